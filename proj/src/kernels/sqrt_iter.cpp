#include "helba/kernels/sqrt_iter.hpp"

#include <cmath>

namespace helba::kernels {

SqrtParams make_sqrt_params(double epsilon, double c1, double c2) {
  SqrtParams p;
  p.epsilon = epsilon;
  p.c1 = c1;
  p.c2 = c2;
  p.iterations = sqrt_iterations_for(epsilon, c1, c2);
  return p;
}

he::Ciphertext he_sqrt(const he::EvalBackend& be, const he::Ciphertext& z, const SqrtParams& params) {
  if (!(params.c1 > 0.0) || !(params.c2 >= params.c1)) throw InvalidParams("he_sqrt: need 0 < c1 <= c2");
  he::Ciphertext q = be.mult_plain(z, 1.0 / params.c2);
  he::Ciphertext v = be.add_plain(q, -1.0);
  for (int k = 0; k < params.iterations; ++k) {
    he::Ciphertext u = be.add_plain(be.mult_plain(v, -0.5), 1.0);
    q = be.mult(q, u);
    he::Ciphertext w = be.mult(v, v);
    he::Ciphertext s = be.mult_plain(be.add_plain(v, -3.0), 0.25);
    v = be.mult(w, s);
  }
  return be.mult_plain(q, std::sqrt(params.c2));
}

double plain_sqrt_iter(double z, double c2, int iterations) {
  double q = z / c2;
  double v = q - 1.0;
  for (int k = 0; k < iterations; ++k) {
    q = q * (1.0 - v / 2.0);
    v = v * v * (v - 3.0) / 4.0;
  }
  return q * std::sqrt(c2);
}

}  // namespace helba::kernels
