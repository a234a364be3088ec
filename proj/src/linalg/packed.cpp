#include "helba/linalg/packed.hpp"

namespace helba::linalg {

namespace {
std::vector<std::size_t> identity_table(std::size_t n_slots) {
  std::vector<std::size_t> t(n_slots);
  for (std::size_t i = 0; i < n_slots; ++i) t[i] = i;
  return t;
}
}  // namespace

std::vector<std::size_t> sigma_table(std::size_t p, std::size_t n_slots) {
  auto t = identity_table(n_slots);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) t[i * p + j] = i * p + (i + j) % p;
  return t;
}

std::vector<std::size_t> tau_table(std::size_t p, std::size_t n_slots) {
  auto t = identity_table(n_slots);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) t[i * p + j] = ((i + j) % p) * p + j;
  return t;
}

std::vector<std::size_t> col_shift_table(std::size_t p, std::size_t k, std::size_t n_slots) {
  auto t = identity_table(n_slots);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) t[i * p + j] = i * p + (j + k) % p;
  return t;
}

std::vector<std::size_t> row_shift_table(std::size_t p, std::size_t k, std::size_t n_slots) {
  auto t = identity_table(n_slots);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) t[i * p + j] = ((i + k) % p) * p + j;
  return t;
}

std::vector<std::size_t> transpose_table(std::size_t d, std::size_t n_slots) {
  auto t = identity_table(n_slots);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) t[i * d + j] = j * d + i;
  return t;
}

PackedMatrix encode_matrix(const he::EvalBackend& be, const Eigen::MatrixXd& m) {
  const std::size_t p = static_cast<std::size_t>(m.rows());
  const std::size_t q = static_cast<std::size_t>(m.cols());
  if (p * q > be.n_slots()) throw ShapeError("encode_matrix: p*q exceeds slot capacity");
  std::vector<double> flat(p * q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) flat[i * q + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return {be.encrypt(flat), p, q};
}

PackedVector encode_vector(const he::EvalBackend& be, const Eigen::VectorXd& y, std::size_t reps) {
  const std::size_t q = static_cast<std::size_t>(y.size());
  if (reps * q > be.n_slots()) throw ShapeError("encode_vector: p*q exceeds slot capacity");
  std::vector<double> flat(reps * q);
  for (std::size_t i = 0; i < reps; ++i)
    for (std::size_t j = 0; j < q; ++j) flat[i * q + j] = y(static_cast<Eigen::Index>(j));
  return {be.encrypt(flat), reps, q};
}

he::Ciphertext mat_vec(const he::EvalBackend& be, const PackedMatrix& a, const PackedVector& y) {
  if (a.cols != y.dim || a.rows != y.reps) throw ShapeError("mat_vec: shape mismatch");
  he::Ciphertext prod = be.mult(a.ct, y.ct);
  return be.sum_cols(prod, a.rows, a.cols);
}

PackedMatrix mat_mul(const he::EvalBackend& be, const PackedMatrix& m, const PackedMatrix& n) {
  if (m.rows != m.cols || n.rows != n.cols || m.rows != n.rows) throw ShapeError("mat_mul: square matrices required");
  const std::size_t p = m.rows;
  if (2 * p * p > be.n_slots()) throw ShapeError("mat_mul: needs 2*p^2 slot workspace");
  he::Ciphertext a0 = be.permute(m.ct, sigma_table(p, be.n_slots()));
  he::Ciphertext b0 = be.permute(n.ct, tau_table(p, be.n_slots()));
  he::Ciphertext acc = be.mult(a0, b0);
  for (std::size_t k = 1; k < p; ++k) {
    he::Ciphertext ak = be.permute(a0, col_shift_table(p, k, be.n_slots()));
    he::Ciphertext bk = be.permute(b0, row_shift_table(p, k, be.n_slots()));
    acc = be.add(acc, be.mult(ak, bk));
  }
  return {std::move(acc), p, p};
}

he::Ciphertext dot_product(const he::EvalBackend& be, const PackedVector& a, const PackedVector& b) {
  if (a.dim != b.dim || a.reps != b.reps) throw ShapeError("dot_product: layout mismatch");
  he::Ciphertext prod = be.mult(a.ct, b.ct);
  return be.sum_cols(prod, a.reps, a.dim);
}

PackedVector block_to_replicated(const he::EvalBackend& be, const he::Ciphertext& blocks, std::size_t d) {
  return {be.permute(blocks, transpose_table(d, be.n_slots())), d, d};
}

Eigen::MatrixXd plain_permutation_product(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n) {
  const Eigen::Index p = m.rows();
  Eigen::MatrixXd sig(p, p), tau(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      sig(i, j) = m(i, (i + j) % p);
      tau(i, j) = n((i + j) % p, j);
    }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j) acc(i, j) += sig(i, (j + k) % p) * tau((i + k) % p, j);
  }
  return acc;
}

Eigen::MatrixXd decode_matrix(const he::Backend& be, const PackedMatrix& a, he::Party who) {
  std::vector<double> slots = be.decrypt(a.ct, who);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols));
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = slots[i * a.cols + j];
  return m;
}

Eigen::VectorXd decode_matvec(const he::Backend& be, const he::Ciphertext& blocks, std::size_t p,
                              std::size_t q, he::Party who) {
  std::vector<double> slots = be.decrypt(blocks, who);
  Eigen::VectorXd v(static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) v(static_cast<Eigen::Index>(i)) = slots[i * q];
  return v;
}

}  // namespace helba::linalg
