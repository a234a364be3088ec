#include "helba/kernels/inverse.hpp"

namespace helba::kernels {

InverseParams make_inverse_params(double epsilon, double eigen_lb, double trace_bound) {
  InverseParams p;
  p.epsilon = epsilon;
  p.eigen_lb = eigen_lb;
  p.trace_bound = trace_bound;
  p.iterations = inverse_iterations_for(epsilon, eigen_lb, trace_bound);
  return p;
}

linalg::PackedMatrix newton_inverse(const he::EvalBackend& be, const linalg::PackedMatrix& v,
                                    const InverseParams& params) {
  if (!(params.trace_bound > 0.0)) throw InvalidParams("newton_inverse: trace bound must be > 0");
  if (!(params.eigen_lb > 0.0)) throw InvalidParams("newton_inverse: eigenvalue bound must be > 0");
  if (v.rows != v.cols) throw ShapeError("newton_inverse: square matrix required");
  const std::size_t d = v.rows;
  const double inv_c = 1.0 / params.trace_bound;

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  linalg::PackedMatrix x = linalg::encode_matrix(be, inv_c * eye);
  linalg::PackedMatrix two_eye = linalg::encode_matrix(be, 2.0 * eye);
  linalg::PackedMatrix m{be.mult_plain(v.ct, inv_c), d, d};

  for (int k = 0; k < params.iterations; ++k) {
    linalg::PackedMatrix t{be.sub(two_eye.ct, m.ct), d, d};
    x = linalg::mat_mul(be, x, t);
    m = linalg::mat_mul(be, t, m);
  }
  return x;
}

}  // namespace helba::kernels
