#pragma once

#include <vector>

#include "helba/he/backend.hpp"
#include "helba/kernels/depths.hpp"

namespace helba::kernels {

// Depth schedule for the approximate-argmax routine at a given precision.
struct ComparatorParams {
  int n = 1;            // polynomial family index; formulas are pinned for n = 1
  double epsilon = 0.0;
  int max_depth = 0;    // d: iterations per NewMax inside the max phase
  int comp_depth = 0;   // d': iterations of the final comparisons
  double alpha = 0.0;
};

ComparatorParams make_comparator_params(double epsilon, int n = 1);

// One application of the odd contraction polynomial
//   f_n(x) = sum_{i<=n} (1/4^i) binom(2i,i) x (1-x^2)^i
// which pushes values in [-1,1] toward the endpoints. f_1(x) = (3x - x^3)/2.
he::Ciphertext fn_step(const he::EvalBackend& be, const he::Ciphertext& x, int n);
double plain_fn_step(double x, int n);

// Approximate indicator 1_{a>b} for a, b in [0,1]: iterate f_n on a-b,
// return (x+1)/2. Within eps of the indicator when |a-b| >= eps and the
// depth is at least new_comp_depth_for(eps, n).
he::Ciphertext new_comp(const he::EvalBackend& be, const he::Ciphertext& a, const he::Ciphertext& b,
                        int n, int depth);
// Variant with a plaintext right operand.
he::Ciphertext new_comp_plain(const he::EvalBackend& be, const he::Ciphertext& a, double b, int n,
                              int depth);

// Approximate max{a,b} = (a+b)/2 + ((a-b)/2) f_n^d(a-b).
he::Ciphertext new_max(const he::EvalBackend& be, const he::Ciphertext& a, const he::Ciphertext& b,
                       int n, int depth);

// Fold of new_max over a list; within K*eps of the true maximum.
he::Ciphertext amax(const he::EvalBackend& be, const std::vector<he::Ciphertext>& values, int n,
                    int depth);

// Comparison vector b with b_i ~ 1_{a_i = max}. Packs slot i of the i-th
// comparison into one ciphertext. Any index with b_i >= eps is a
// 2*eps-approximate argmax, and at least one such index exists.
he::Ciphertext acomp(const he::EvalBackend& be, const std::vector<he::Ciphertext>& values,
                     double epsilon, int n = 1);

// Threshold test for the batching rule: compares trace_sum/scale against
// threshold/scale with the given comparison depth. Output near 1 when the
// trace exceeds the threshold, near 0 when it is below, 1/2 on a tie.
he::Ciphertext trace_compare(const he::EvalBackend& be, const he::Ciphertext& trace_sum,
                             double threshold, double scale, double epsilon, int depth);

}  // namespace helba::kernels
