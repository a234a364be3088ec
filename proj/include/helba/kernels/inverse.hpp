#pragma once

#include "helba/kernels/depths.hpp"
#include "helba/linalg/packed.hpp"

namespace helba::kernels {

struct InverseParams {
  double trace_bound = 0.0;  // c >= Tr(V)
  double eigen_lb = 0.0;     // lower bound on the smallest eigenvalue
  int iterations = 0;        // >= inverse_iterations_for(epsilon, ...)
  double epsilon = 0.0;      // target spectral error
};

InverseParams make_inverse_params(double epsilon, double eigen_lb, double trace_bound);

// Multiplication-only inverse iteration
//   X_{k+1} = X_k (2I - M_k),  M_{k+1} = (2I - M_k) M_k,
// started from X_0 = I/c, M_0 = V/c. Converges to V^{-1} for SPD V with
// c >= Tr(V); spectral error <= epsilon after `iterations` steps.
linalg::PackedMatrix newton_inverse(const he::EvalBackend& be, const linalg::PackedMatrix& v,
                                    const InverseParams& params);

}  // namespace helba::kernels
