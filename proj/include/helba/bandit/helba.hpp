#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "helba/bandit/config.hpp"
#include "helba/kernels/compare.hpp"
#include "helba/kernels/inverse.hpp"
#include "helba/kernels/sqrt_iter.hpp"
#include "helba/linalg/packed.hpp"

namespace helba::bandit {

struct KernelDepthRecord {
  const char* kernel;
  int predicted;
  int measured;
};

struct ServerTelemetry {
  long refreshes = 0;
  long masked_recrypts = 0;    // masked re-encryptions of the packed index vector
  long plain_reencrypts = 0;   // accumulator re-encryptions at batch boundaries
  long trace_checks = 0;
  long sqrt_calls = 0;
  long acomp_calls = 0;
  std::vector<KernelDepthRecord> depth_ledger;
};

// The server-visible surface of the user party: re-encryption at fresh
// level and decryption of masked scalars. Nothing here exposes plaintext
// protocol data to the server.
class UserLink {
 public:
  virtual ~UserLink() = default;
  virtual he::Ciphertext reencrypt(const he::Ciphertext& ct) = 0;
  virtual std::vector<double> reveal_masked(const he::Ciphertext& masked) = 0;
};

// Holds the secret key (full backend reference) and performs every
// decryption in the protocol.
class UserParty final : public UserLink {
 public:
  explicit UserParty(he::Backend& backend) : backend_(backend) {}

  linalg::PackedVector encrypt_context(const Eigen::VectorXd& s) const;
  std::vector<linalg::PackedVector> encrypt_context_set(const std::vector<Eigen::VectorXd>& set) const;
  he::Ciphertext encrypt_reward(double r) const;

  // Decrypts the comparison vector and picks the arm: among slots with
  // b_a >= 1/(4t), the largest entry wins, ties to the lowest index.
  int decode_action(const he::Ciphertext& b_packed, int t, int num_arms) const;

  he::Ciphertext reencrypt(const he::Ciphertext& ct) override;
  std::vector<double> reveal_masked(const he::Ciphertext& masked) override;

 private:
  he::Backend& backend_;
};

// Per-batch encrypted statistics. omega and a_bar only change at batch
// boundaries; the accumulators change every step.
struct HelbaState {
  linalg::PackedMatrix lambda_check;  // lambda I + sum x x^T
  linalg::PackedVector g_check;       // sum y x (replicated layout)
  linalg::PackedMatrix a_bar;         // approximate inverse of the batch design matrix
  linalg::PackedVector omega;         // batch estimate (replicated layout)
  std::optional<he::Ciphertext> trace_acc;  // sum ||x_l||^2_{a_bar}, l in (t_j, t-1]
  int trace_len = 0;
  int t_j = 1;
  int batch_index = 0;
  int t = 1;
};

class HelbaServer {
 public:
  HelbaServer(const he::EvalBackend& be, const BanditConfig& cfg, UserLink& user);

  const HelbaState& state() const { return state_; }
  const ServerTelemetry& telemetry() const { return telemetry_; }

  // One packed ciphertext with rho_a in slot a: inner product with the
  // batch estimate plus beta * (sqrt of the shifted quadratic form + 1/t).
  // beta is the plain confidence radius for this step (beta_tilde).
  he::Ciphertext compute_indexes(const std::vector<linalg::PackedVector>& contexts, int t, double beta);

  // Affine map of all slots into [0,1] under the confidence event.
  he::Ciphertext rescale_indexes(const he::Ciphertext& rho_packed, int t, double beta);

  // Masked re-encryption of the packed indexes, then the comparison vector
  // at precision 1/(4.1 t).
  he::Ciphertext select_arm(const he::Ciphertext& rho_hat, int t);

  // Rank-one update of the accumulators plus the trace term for the
  // batching rule (held back until the batch decision for this step).
  void observe(const linalg::PackedVector& x_chosen, const he::Ciphertext& y, int t);

  // True when the masked trace comparison clears 0.45 or the geometric
  // condition t >= (1+eta) t_j fires.
  bool check_batch_end(int t);

  // User-assisted re-encryption of the accumulators, fresh inverse via the
  // multiplication-only iteration, new estimate.
  void refresh(int t);

 private:
  he::Ciphertext quad_form(const linalg::PackedVector& x);
  he::Ciphertext recrypt_masked(const he::Ciphertext& ct, double lo, double hi);
  void record_depth(const char* kernel, int predicted, int measured);

  const he::EvalBackend& be_;
  BanditConfig cfg_;
  UserLink& user_;
  HelbaState state_;
  ServerTelemetry telemetry_;
  std::optional<he::Ciphertext> pending_quad_;
  int pending_step_ = 0;
};

}  // namespace helba::bandit
