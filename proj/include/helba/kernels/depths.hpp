#pragma once

#include <cstddef>

namespace helba::kernels {

// Contraction constant of the comparator polynomial family:
// c_n = (2n+1)/4^n * binom(2n, n). For n = 1 this is 3/2.
double comparator_cn(int n);

// alpha = 3/2 + 5.2 ln(c_n)/ln(4) + ln(c_n)/(2 ln(n+1)).
double comparator_alpha(int n);

// Iterations of the inverse recurrence guaranteeing spectral error <= eps
// when c >= Tr(V) and lambda_lb lower-bounds the smallest eigenvalue:
// ceil( (1/ln 2) ln( (ln lambda + ln eps) / ln(1 - lambda/c) ) ).
int inverse_iterations_for(double epsilon, double lambda_lb, double c);

// Iterations of the square-root recurrence for |q_k sqrt(c2) - sqrt(z)| <= eps
// over z in [c1, c2]:
// ceil( (1/ln 2) ln( (ln eps - ln sqrt(c2)) / (4 ln(1 - c1/(4 c2))) ) ).
// The closed form is loose; sufficiency is validated by direct iteration
// in the tests.
int sqrt_iterations_for(double epsilon, double c1, double c2);

// Comparison depth certifying |output - 1_{a>b}| <= eps when |a-b| >= eps:
// floor(3.2 + ln(1/eps)/ln(c_n) + ln(ln(1/eps)/ln 2 - 2)/ln(n+1)) + 1.
int new_comp_depth_for(double epsilon, int n);

// Max-phase depth for |NewMax - max| <= eps:
// ceil( ln(ln(1/eps)/ln 2 - 2)/ln(c_n) ).
int new_max_depth_for(double epsilon, int n);

// Max-phase depth of the argmax vector computation:
// ceil( (1/ln c_n) ln( alpha ln(1/eps)/ln 2 - 2 ) ),
// i.e. the max-depth formula instantiated at accuracy eps^alpha.
int acomp_max_depth(double epsilon, int n);

// Compare-phase depth of the argmax vector computation:
// 1 + floor(3.2 + ln(1/eps)/ln(c_n) + ln(ln(1/eps)/ln 2 - 2)/ln(n+1)),
// the depth carrying the eps-margin comparison guarantee.
int acomp_compare_depth(double epsilon, int n);

// Depth for comparing a trace ratio against a threshold with margin
// eps_prime at output precision eps. The third term is only defined for
// eps < 1/8 and is clamped at zero for the coarse thresholds used by the
// batching rule.
int trace_compare_depth(double epsilon, double eps_prime, int n);

// Static level-consumption predictors. They mirror the exact operation
// schedule of each kernel, so measured consumption must match them
// ciphertext for ciphertext.
int sqrt_depth(int k0, bool pt_costs_level);
int fn_step_depth(int n, bool pt_costs_level);
int new_comp_levels(int depth, int n, bool pt_costs_level);
int new_max_levels(int depth, int n, bool pt_costs_level);
int amax_levels(std::size_t count, int depth, int n, bool pt_costs_level);
int acomp_levels(std::size_t count, int max_depth, int comp_depth, int n, bool pt_costs_level);
int trace_compare_levels(int depth, int n, bool pt_costs_level);
int newton_inverse_levels(int iterations, bool pt_costs_level);
int mat_mul_levels();
int mat_vec_levels();

}  // namespace helba::kernels
