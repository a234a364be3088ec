#include "helba/kernels/compare.hpp"

#include <cmath>

namespace helba::kernels {

namespace {
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

ComparatorParams make_comparator_params(double epsilon, int n) {
  if (!(epsilon > 0.0) || epsilon >= 0.25) throw InvalidParams("comparator params: epsilon < 1/4 required");
  ComparatorParams p;
  p.n = n;
  p.epsilon = epsilon;
  p.max_depth = acomp_max_depth(epsilon, n);
  p.comp_depth = acomp_compare_depth(epsilon, n);
  p.alpha = comparator_alpha(n);
  return p;
}

he::Ciphertext fn_step(const he::EvalBackend& be, const he::Ciphertext& x, int n) {
  if (n < 1) throw InvalidParams("fn_step: n >= 1 required");
  if (n == 1) {
    // (x/2) * (3 - x^2): the halving runs beside the square, two levels total
    he::Ciphertext half = be.mult_plain(x, 0.5);
    he::Ciphertext sq = be.mult(x, x);
    return be.mult(half, be.add_plain(be.negate(sq), 3.0));
  }
  // Generic n via Horner on g(u) = sum_i coef_i u^i with u = 1 - x^2.
  he::Ciphertext u = be.add_plain(be.negate(be.mult(x, x)), 1.0);
  double coef_n = binom(2 * n, n) / std::pow(4.0, n);
  he::Ciphertext g = be.mult_plain(u, coef_n);
  for (int i = n - 1; i >= 1; --i) {
    g = be.add_plain(g, binom(2 * i, i) / std::pow(4.0, i));
    g = be.mult(g, u);
  }
  g = be.add_plain(g, 1.0);
  return be.mult(x, g);
}

double plain_fn_step(double x, int n) {
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) acc += binom(2 * i, i) / std::pow(4.0, i) * x * std::pow(1.0 - x * x, i);
  return acc;
}

namespace {
he::Ciphertext comp_core(const he::EvalBackend& be, he::Ciphertext x, int n, int depth) {
  for (int k = 0; k < depth; ++k) x = fn_step(be, x, n);
  return be.mult_plain(be.add_plain(x, 1.0), 0.5);
}
}  // namespace

he::Ciphertext new_comp(const he::EvalBackend& be, const he::Ciphertext& a, const he::Ciphertext& b,
                        int n, int depth) {
  return comp_core(be, be.sub(a, b), n, depth);
}

he::Ciphertext new_comp_plain(const he::EvalBackend& be, const he::Ciphertext& a, double b, int n,
                              int depth) {
  return comp_core(be, be.add_plain(a, -b), n, depth);
}

he::Ciphertext new_max(const he::EvalBackend& be, const he::Ciphertext& a, const he::Ciphertext& b,
                       int n, int depth) {
  he::Ciphertext x = be.sub(a, b);
  he::Ciphertext mid = be.mult_plain(be.add(a, b), 0.5);
  he::Ciphertext halfdiff = be.mult_plain(x, 0.5);
  for (int k = 0; k < depth; ++k) x = fn_step(be, x, n);
  return be.add(mid, be.mult(halfdiff, x));
}

he::Ciphertext amax(const he::EvalBackend& be, const std::vector<he::Ciphertext>& values, int n,
                    int depth) {
  if (values.empty()) throw InvalidParams("amax: at least one value required");
  he::Ciphertext m = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) m = new_max(be, m, values[i], n, depth);
  return m;
}

he::Ciphertext acomp(const he::EvalBackend& be, const std::vector<he::Ciphertext>& values,
                     double epsilon, int n) {
  if (values.empty()) throw InvalidParams("acomp: at least one value required");
  if (values.size() > be.n_slots()) throw ShapeError("acomp: more values than slots");
  const ComparatorParams params = make_comparator_params(epsilon, n);
  he::Ciphertext m = amax(be, values, n, params.max_depth);

  // Each comparison carries its value in slot 0; isolate it and rotate it
  // into the output slot for its arm.
  std::vector<double> unit(be.n_slots(), 0.0);
  unit[0] = 1.0;
  he::Ciphertext packed;
  for (std::size_t i = 0; i < values.size(); ++i) {
    he::Ciphertext bi = new_comp(be, values[i], m, n, params.comp_depth);
    he::Ciphertext slot = be.rotate(be.mult_plain(bi, unit), -static_cast<long>(i));
    packed = (i == 0) ? slot : be.add(packed, slot);
  }
  return packed;
}

he::Ciphertext trace_compare(const he::EvalBackend& be, const he::Ciphertext& trace_sum,
                             double threshold, double scale, double epsilon, int depth) {
  if (!(scale > 0.0)) throw InvalidParams("trace_compare: scale must be > 0");
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) throw InvalidParams("trace_compare: epsilon in (0,1/2) required");
  he::Ciphertext ratio = be.mult_plain(trace_sum, 1.0 / scale);
  return new_comp_plain(be, ratio, threshold / scale, 1, depth);
}

}  // namespace helba::kernels
