#include "helba/kernels/depths.hpp"

#include <algorithm>
#include <cmath>

#include "helba/he/errors.hpp"

namespace helba::kernels {

namespace {
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

double comparator_cn(int n) {
  if (n < 1) throw InvalidParams("comparator family index must be >= 1");
  return (2.0 * n + 1.0) / std::pow(4.0, n) * binom(2 * n, n);
}

double comparator_alpha(int n) {
  const double cn = comparator_cn(n);
  return 1.5 + 5.2 * std::log(cn) / std::log(4.0) + std::log(cn) / (2.0 * std::log(n + 1.0));
}

int inverse_iterations_for(double epsilon, double lambda_lb, double c) {
  if (!(epsilon > 0.0)) throw InvalidParams("inverse_iterations_for: epsilon must be > 0");
  if (!(lambda_lb > 0.0) || !(c > 0.0)) throw InvalidParams("inverse_iterations_for: bounds must be > 0");
  if (!(lambda_lb < c)) throw InvalidParams("inverse_iterations_for: need lambda < c");
  if (lambda_lb * epsilon > 1.0) throw InvalidParams("inverse_iterations_for: need lambda*eps <= 1");
  const double num = std::log(lambda_lb) + std::log(epsilon);  // < 0
  const double den = std::log(1.0 - lambda_lb / c);            // < 0
  const double k = std::log(num / den) / std::log(2.0);
  return std::max(1, static_cast<int>(std::ceil(k)));
}

int sqrt_iterations_for(double epsilon, double c1, double c2) {
  if (!(c1 > 0.0) || !(c2 >= c1)) throw InvalidParams("sqrt_iterations_for: need 0 < c1 <= c2");
  if (!(epsilon > 0.0) || !(epsilon < std::sqrt(c2))) throw InvalidParams("sqrt_iterations_for: need 0 < eps < sqrt(c2)");
  const double num = std::log(epsilon) - 0.5 * std::log(c2);     // < 0
  const double den = 4.0 * std::log(1.0 - c1 / (4.0 * c2));      // < 0
  const double ratio = num / den;
  if (ratio <= 1.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log(ratio) / std::log(2.0))));
}

int new_comp_depth_for(double epsilon, int n) {
  if (!(epsilon > 0.0) || epsilon >= 1.0) throw InvalidParams("new_comp_depth_for: epsilon in (0,1) required");
  const double cn = comparator_cn(n);
  const double l = std::log(1.0 / epsilon);
  const double inner = l / std::log(2.0) - 2.0;
  if (inner <= 0.0) throw InvalidParams("new_comp_depth_for: epsilon too coarse (need eps < 1/4)");
  const int d = static_cast<int>(std::floor(3.2 + l / std::log(cn) + std::log(inner) / std::log(n + 1.0))) + 1;
  return std::max(1, d);  // the log term sinks the value below one near eps = 1/4
}

int new_max_depth_for(double epsilon, int n) {
  if (!(epsilon > 0.0)) throw InvalidParams("new_max_depth_for: epsilon must be > 0");
  const double inner = std::log(1.0 / epsilon) / std::log(2.0) - 2.0;
  if (inner <= 1.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log(inner) / std::log(comparator_cn(n)))));
}

int acomp_max_depth(double epsilon, int n) {
  // The max phase must land within eps^alpha of the true maximum, so its
  // per-fold depth is the eps^alpha instance of the max-depth formula.
  if (!(epsilon > 0.0) || epsilon >= 0.25) throw InvalidParams("acomp_max_depth: epsilon < 1/4 required");
  const double arg = comparator_alpha(n) * std::log(1.0 / epsilon) / std::log(2.0) - 2.0;
  return std::max(1, static_cast<int>(std::ceil(std::log(arg) / std::log(comparator_cn(n)))));
}

int acomp_compare_depth(double epsilon, int n) {
  // Final comparisons against the approximate maximum carry the margin
  // guarantee, so they run at the margin-comparison depth.
  if (!(epsilon > 0.0) || epsilon >= 0.25) throw InvalidParams("acomp_compare_depth: epsilon < 1/4 required");
  return new_comp_depth_for(epsilon, n);
}

int trace_compare_depth(double epsilon, double eps_prime, int n) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) throw InvalidParams("trace_compare_depth: epsilon in (0,1/2) required");
  if (!(eps_prime > 0.0)) throw InvalidParams("trace_compare_depth: eps_prime must be > 0");
  const double cn = comparator_cn(n);
  const double inner = std::log(1.0 / epsilon) / std::log(2.0) - 2.0;
  const double third = inner > 1.0 ? std::log(inner) / std::log(n + 1.0) : 0.0;
  return static_cast<int>(std::ceil(3.2 + std::log(1.0 / eps_prime) / std::log(cn) + third));
}

int sqrt_depth(int k0, bool pt) {
  const int p = pt ? 1 : 0;
  int q = -p, v = -p;  // levels relative to the input
  for (int i = 0; i < k0; ++i) {
    const int u = v - p;
    q = std::min(q, u) - 1;
    const int w = v - 1;
    const int s = v - p;
    v = std::min(w, s) - 1;
  }
  return -(q - p);  // final plaintext scale by sqrt(c2)
}

int fn_step_depth(int n, bool pt) {
  if (n == 1) return 2;  // (x/2) * (3 - x^2), the halving runs beside the square
  // generic Horner: square, n chained ct products, final product with x
  const int p = pt ? 1 : 0;
  int s = -1;
  int g = s - p;  // first Horner step is a plaintext coefficient multiply
  for (int i = 1; i < n; ++i) g = std::min(g, s) - 1;
  return -(std::min(g, 0) - 1);
}

int new_comp_levels(int depth, int n, bool pt) {
  const int p = pt ? 1 : 0;
  return depth * fn_step_depth(n, pt) + p;  // iterate f_n, then (x+1)/2
}

int new_max_levels(int depth, int n, bool pt) {
  const int p = pt ? 1 : 0;
  int x = -depth * fn_step_depth(n, pt);
  int halfdiff = -p;
  return -(std::min(halfdiff, x) - 1);  // y + halfdiff * f^d(a-b)
}

int amax_levels(std::size_t count, int depth, int n, bool pt) {
  if (count <= 1) return 0;
  return static_cast<int>(count - 1) * new_max_levels(depth, n, pt);
}

int acomp_levels(std::size_t count, int max_depth, int comp_depth, int n, bool pt) {
  const int p = pt ? 1 : 0;
  // max phase, compare phase, then packing the b entries into one ciphertext
  return amax_levels(count, max_depth, n, pt) + new_comp_levels(comp_depth, n, pt) + p;
}

int trace_compare_levels(int depth, int n, bool pt) {
  const int p = pt ? 1 : 0;
  return p + new_comp_levels(depth, n, pt);  // rescale by 1/scale, then compare
}

int newton_inverse_levels(int iterations, bool pt) {
  return (pt ? 1 : 0) + iterations;  // M0 = V/c, then one mat_mul level each
}

int mat_mul_levels() { return 1; }
int mat_vec_levels() { return 1; }

}  // namespace helba::kernels
