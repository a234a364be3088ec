#pragma once

#include "helba/he/backend.hpp"
#include "helba/kernels/depths.hpp"

namespace helba::kernels {

struct SqrtParams {
  double c1 = 0.0;      // lower bound on the input
  double c2 = 0.0;      // upper bound on the input
  int iterations = 0;   // >= sqrt_iterations_for(epsilon, c1, c2)
  double epsilon = 0.0; // target |result - sqrt(z)|
};

SqrtParams make_sqrt_params(double epsilon, double c1, double c2);

// Multiplication-only square root:
//   q_{k+1} = q_k (1 - v_k/2),  v_{k+1} = v_k^2 (v_k - 3)/4,
// with q_0 = z/c2, v_0 = z/c2 - 1. Returns sqrt(c2) * q_k, within epsilon
// of sqrt(z) for z in [c1, c2].
he::Ciphertext he_sqrt(const he::EvalBackend& be, const he::Ciphertext& z, const SqrtParams& params);

// Plaintext mirror of the same recurrence (oracle / parameter validation).
double plain_sqrt_iter(double z, double c2, int iterations);

}  // namespace helba::kernels
