#include "helba/bandit/helba.hpp"

#include <cmath>

namespace helba::bandit {

linalg::PackedVector UserParty::encrypt_context(const Eigen::VectorXd& s) const {
  return linalg::encode_vector(backend_, s, static_cast<std::size_t>(s.size()));
}

std::vector<linalg::PackedVector> UserParty::encrypt_context_set(
    const std::vector<Eigen::VectorXd>& set) const {
  std::vector<linalg::PackedVector> out;
  out.reserve(set.size());
  for (const auto& s : set) out.push_back(encrypt_context(s));
  return out;
}

he::Ciphertext UserParty::encrypt_reward(double r) const {
  return backend_.encrypt(std::vector<double>(backend_.n_slots(), r));
}

int UserParty::decode_action(const he::Ciphertext& b_packed, int t, int num_arms) const {
  const std::vector<double> b = backend_.decrypt(b_packed, he::Party::kUser);
  const double threshold = 1.0 / (4.0 * t);
  int best = -1;
  double best_val = -1.0;
  for (int a = 0; a < num_arms; ++a) {
    if (b[static_cast<std::size_t>(a)] >= threshold && b[static_cast<std::size_t>(a)] > best_val) {
      best = a;
      best_val = b[static_cast<std::size_t>(a)];
    }
  }
  if (best < 0) throw EmptySelectionError("no comparison entry cleared 1/(4t)");
  return best;
}

he::Ciphertext UserParty::reencrypt(const he::Ciphertext& ct) {
  return backend_.encrypt(backend_.decrypt(ct, he::Party::kUser));
}

std::vector<double> UserParty::reveal_masked(const he::Ciphertext& masked) {
  return backend_.decrypt(masked, he::Party::kUser);
}

HelbaServer::HelbaServer(const he::EvalBackend& be, const BanditConfig& cfg, UserLink& user)
    : be_(be), cfg_(cfg), user_(user) {
  cfg_.validate();
  const std::size_t d = static_cast<std::size_t>(cfg_.dim);
  if (2 * d * d > be_.n_slots()) throw ConfigError("backend slots too small for 2*d^2 workspace");
  if (static_cast<std::size_t>(cfg_.num_arms) > be_.n_slots()) throw ConfigError("more arms than slots");
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(cfg_.dim, cfg_.dim);
  state_.lambda_check = linalg::encode_matrix(be_, cfg_.lambda * eye);
  state_.a_bar = linalg::encode_matrix(be_, (1.0 / cfg_.lambda) * eye);
  state_.g_check = linalg::encode_vector(be_, Eigen::VectorXd::Zero(cfg_.dim), d);
  state_.omega = linalg::encode_vector(be_, Eigen::VectorXd::Zero(cfg_.dim), d);
}

void HelbaServer::record_depth(const char* kernel, int predicted, int measured) {
  telemetry_.depth_ledger.push_back({kernel, predicted, measured});
}

he::Ciphertext HelbaServer::quad_form(const linalg::PackedVector& x) {
  const int lvl_in = std::min(state_.a_bar.ct.level(), x.ct.level());
  he::Ciphertext v = linalg::mat_vec(be_, state_.a_bar, x);
  record_depth("mat_vec", kernels::mat_vec_levels(), lvl_in - v.level());
  linalg::PackedVector vrep = linalg::block_to_replicated(be_, v, static_cast<std::size_t>(cfg_.dim));
  return linalg::dot_product(be_, vrep, x);
}

he::Ciphertext HelbaServer::compute_indexes(const std::vector<linalg::PackedVector>& contexts, int t,
                                            double beta) {
  if (contexts.size() != static_cast<std::size_t>(cfg_.num_arms)) throw ShapeError("one context per arm required");
  const bool pt = be_.config().pt_mult_costs_level;
  const double eps_j = inverse_epsilon(state_.t_j, cfg_);
  const double c1 = eps_j;
  const double c2 = c1 + cfg_.feature_bound * cfg_.feature_bound / std::sqrt(cfg_.lambda) *
                             (1.0 + 1.0 / std::sqrt(cfg_.lambda));
  kernels::SqrtParams sp = kernels::make_sqrt_params(1.0 / t, c1, c2);

  std::vector<double> unit(be_.n_slots(), 0.0);
  he::Ciphertext packed;
  for (std::size_t a = 0; a < contexts.size(); ++a) {
    he::Ciphertext z = be_.add_plain(quad_form(contexts[a]), eps_j);
    he::Ciphertext root = kernels::he_sqrt(be_, z, sp);
    ++telemetry_.sqrt_calls;
    record_depth("he_sqrt", kernels::sqrt_depth(sp.iterations, pt), z.level() - root.level());
    he::Ciphertext bonus = be_.add_plain(be_.mult_plain(root, beta), beta / t);
    he::Ciphertext rho = be_.add(linalg::dot_product(be_, state_.omega, contexts[a]), bonus);
    unit.assign(be_.n_slots(), 0.0);
    unit[a] = 1.0;
    he::Ciphertext slot = be_.mult_plain(rho, unit);
    packed = (a == 0) ? slot : be_.add(packed, slot);
  }
  return packed;
}

he::Ciphertext HelbaServer::rescale_indexes(const he::Ciphertext& rho_packed, int t, double beta) {
  const double rho_max = rho_max_bound(t, beta, cfg_);
  he::Ciphertext shifted = be_.add_plain(rho_packed, -cfg_.r_min);
  return be_.mult_plain(shifted, 1.0 / (rho_max - cfg_.r_min));
}

he::Ciphertext HelbaServer::recrypt_masked(const he::Ciphertext& ct, double lo, double hi) {
  auto [masked, tok] = be_.mask(ct, lo, hi);
  he::Ciphertext fresh = user_.reencrypt(masked);
  ++telemetry_.masked_recrypts;
  return be_.unmask_ct(fresh, tok);
}

he::Ciphertext HelbaServer::select_arm(const he::Ciphertext& rho_hat, int t) {
  const bool pt = be_.config().pt_mult_costs_level;
  // The index pipeline plus the comparison tower exceed the depth budget
  // from fresh inputs; the packed indexes go through one masked
  // re-encryption before the comparisons. Window (-1,2) keeps values with
  // mild kernel overshoot away from the modular wrap.
  he::Ciphertext restored = recrypt_masked(rho_hat, -1.0, 2.0);

  std::vector<he::Ciphertext> per_arm;
  std::vector<double> unit(be_.n_slots(), 0.0);
  for (int a = 0; a < cfg_.num_arms; ++a) {
    unit.assign(be_.n_slots(), 0.0);
    unit[static_cast<std::size_t>(a)] = 1.0;
    he::Ciphertext isolated = be_.mult_plain(restored, unit);
    per_arm.push_back(be_.sum_cols(isolated, 1, be_.n_slots()));
  }

  const double eps = 1.0 / (4.1 * t);
  const int lvl_in = per_arm[0].level();
  he::Ciphertext b = kernels::acomp(be_, per_arm, eps);
  ++telemetry_.acomp_calls;
  kernels::ComparatorParams cp = kernels::make_comparator_params(eps, 1);
  record_depth("acomp",
               kernels::acomp_levels(per_arm.size(), cp.max_depth, cp.comp_depth, 1, pt),
               lvl_in - b.level());
  return b;
}

void HelbaServer::observe(const linalg::PackedVector& x_chosen, const he::Ciphertext& y, int t) {
  const std::size_t d = static_cast<std::size_t>(cfg_.dim);
  he::Ciphertext x_block = be_.permute(x_chosen.ct, linalg::transpose_table(d, be_.n_slots()));
  he::Ciphertext outer = be_.mult(x_block, x_chosen.ct);
  state_.lambda_check.ct = be_.add(state_.lambda_check.ct, outer);
  state_.g_check.ct = be_.add(state_.g_check.ct, be_.mult(y, x_chosen.ct));
  pending_quad_ = quad_form(x_chosen);
  pending_step_ = t;
  state_.t = t + 1;
}

bool HelbaServer::check_batch_end(int t) {
  if (t <= state_.t_j) return false;
  const bool geometric = static_cast<double>(t) >= (1.0 + cfg_.eta) * state_.t_j;

  bool trace_fired = false;
  if (state_.trace_acc.has_value() && state_.trace_len >= 1) {
    ++telemetry_.trace_checks;
    const double scale = cfg_.feature_bound * cfg_.feature_bound *
                         (1.0 / cfg_.lambda + 1.0 / std::sqrt(cfg_.lambda)) * state_.trace_len;
    const double eps_prime = 1.0 / (4.0 * t * scale);
    const int d5 = kernels::trace_compare_depth(0.45, eps_prime, 1);
    const bool pt = be_.config().pt_mult_costs_level;
    const int lvl_in = state_.trace_acc->level();
    he::Ciphertext delta_ct = kernels::trace_compare(be_, *state_.trace_acc, cfg_.trace_threshold,
                                                     scale, 0.45, d5);
    record_depth("trace_compare", kernels::trace_compare_levels(d5, 1, pt), lvl_in - delta_ct.level());
    // Mask so the decrypting user learns nothing about the comparison;
    // window (-0.5, 1.5) keeps delta = 1 away from the wrap-around.
    auto [masked, tok] = be_.mask(delta_ct, -0.5, 1.5);
    const std::vector<double> revealed = user_.reveal_masked(masked);
    const double delta = be_.unmask(revealed, tok)[0];
    trace_fired = delta >= 0.45;
  }

  const bool end = trace_fired || geometric;
  if (!end && pending_quad_.has_value()) {
    // The trace window covers steps t_j+1 .. t-1, so the batch's first
    // step never enters it.
    if (pending_step_ > state_.t_j) {
      state_.trace_acc = state_.trace_acc.has_value() ? be_.add(*state_.trace_acc, *pending_quad_)
                                                      : *pending_quad_;
      ++state_.trace_len;
    }
    pending_quad_.reset();
  }
  return end;
}

void HelbaServer::refresh(int t) {
  const bool pt = be_.config().pt_mult_costs_level;
  const std::size_t d = static_cast<std::size_t>(cfg_.dim);
  const int t_next = cfg_.batch_start_next_step ? t + 1 : t;

  // Accumulators are consumed at full depth by the inverse iteration, so
  // they take a user round trip back to fresh level first.
  state_.lambda_check.ct = user_.reencrypt(state_.lambda_check.ct);
  state_.g_check.ct = user_.reencrypt(state_.g_check.ct);
  telemetry_.plain_reencrypts += 2;

  const double eps_next = inverse_epsilon(t_next, cfg_);
  const double c = cfg_.lambda * cfg_.dim +
                   cfg_.feature_bound * cfg_.feature_bound * static_cast<double>(t_next);
  kernels::InverseParams ip = kernels::make_inverse_params(
      eps_next / (cfg_.feature_bound * cfg_.feature_bound), cfg_.lambda, c);

  const int lvl_in = state_.lambda_check.ct.level();
  state_.a_bar = kernels::newton_inverse(be_, state_.lambda_check, ip);
  record_depth("newton_inverse", kernels::newton_inverse_levels(ip.iterations, pt),
               lvl_in - state_.a_bar.ct.level());

  he::Ciphertext w = linalg::mat_vec(be_, state_.a_bar, state_.g_check);
  state_.omega = linalg::block_to_replicated(be_, w, d);

  state_.t_j = t_next;
  ++state_.batch_index;
  state_.trace_acc.reset();
  state_.trace_len = 0;
  pending_quad_.reset();
  ++telemetry_.refreshes;
}

}  // namespace helba::bandit
