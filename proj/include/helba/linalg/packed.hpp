#pragma once

#include <Eigen/Dense>
#include <vector>

#include "helba/he/backend.hpp"

namespace helba::linalg {

// Row-major packing of a p x q matrix: entry (i,j) lives in slot i*q+j,
// slots at or beyond p*q stay zero.
struct PackedMatrix {
  he::Ciphertext ct;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// A q-vector replicated p times: slot i*q+j holds y[j] for all i < p.
struct PackedVector {
  he::Ciphertext ct;
  std::size_t reps = 0;
  std::size_t dim = 0;
};

PackedMatrix encode_matrix(const he::EvalBackend& be, const Eigen::MatrixXd& m);
PackedVector encode_vector(const he::EvalBackend& be, const Eigen::VectorXd& y, std::size_t reps);

// Matrix-vector product. Every slot of row block i holds (A y)_i; reads go
// through block starts i*q. Consumes exactly one multiplicative level.
he::Ciphertext mat_vec(const he::EvalBackend& be, const PackedMatrix& a, const PackedVector& y);

// Square matrix product via the sigma/tau/shift permutation identity.
// Permutations are plaintext slot maps, so only the p slotwise ct-ct
// products contribute depth: exactly one level for every size p.
PackedMatrix mat_mul(const he::EvalBackend& be, const PackedMatrix& m, const PackedMatrix& n);

// <a, b> for two vectors in replicated layout; result in every slot.
// One multiplicative level.
he::Ciphertext dot_product(const he::EvalBackend& be, const PackedVector& a, const PackedVector& b);

// Converts a mat_vec result (row-constant blocks) into replicated layout by
// the transpose slot permutation. Square blocks only; level unchanged.
PackedVector block_to_replicated(const he::EvalBackend& be, const he::Ciphertext& blocks, std::size_t d);

// Permutation tables (result[i] = src[table[i]]), identity outside the
// p*p block. Exposed for the plaintext identity checks.
std::vector<std::size_t> sigma_table(std::size_t p, std::size_t n_slots);
std::vector<std::size_t> tau_table(std::size_t p, std::size_t n_slots);
std::vector<std::size_t> col_shift_table(std::size_t p, std::size_t k, std::size_t n_slots);
std::vector<std::size_t> row_shift_table(std::size_t p, std::size_t k, std::size_t n_slots);
std::vector<std::size_t> transpose_table(std::size_t d, std::size_t n_slots);

// Plaintext mirror of the permutation identity, used to validate the
// tables independently of any encryption.
Eigen::MatrixXd plain_permutation_product(const Eigen::MatrixXd& m, const Eigen::MatrixXd& n);

// Oracle helpers for tests.
Eigen::MatrixXd decode_matrix(const he::Backend& be, const PackedMatrix& a, he::Party who);
Eigen::VectorXd decode_matvec(const he::Backend& be, const he::Ciphertext& blocks, std::size_t p,
                              std::size_t q, he::Party who);

}  // namespace helba::linalg
