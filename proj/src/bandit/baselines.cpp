#include "helba/bandit/baselines.hpp"

#include <cmath>
#include <numbers>

namespace helba::bandit {

PlainLinUcbState::PlainLinUcbState(const BanditConfig& cfg) {
  V = cfg.lambda * Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
  b = Eigen::VectorXd::Zero(cfg.dim);
  V_inv_bar = (1.0 / cfg.lambda) * Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
  theta_hat = Eigen::VectorXd::Zero(cfg.dim);
  det_bar = std::pow(cfg.lambda, cfg.dim);
}

PlainLinUcb::PlainLinUcb(const BanditConfig& cfg, SwitchRule rule)
    : cfg_(cfg), rule_(rule), state_(cfg) {
  cfg_.validate();
}

double PlainLinUcb::beta(int t) const {
  const double l2 = cfg_.feature_bound * cfg_.feature_bound;
  const double denom = cfg_.beta_uses_lambda_d ? cfg_.lambda * cfg_.dim : cfg_.lambda;
  const double design = std::log(1.0 + l2 * state_.t_last_update / denom);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double union_bound = std::log(pi2 * static_cast<double>(t) * t / (6.0 * cfg_.delta));
  return cfg_.param_bound * std::sqrt(cfg_.lambda) + cfg_.sigma * std::sqrt(cfg_.dim * (design + union_bound));
}

int PlainLinUcb::select_arm(const std::vector<Eigen::VectorXd>& contexts, int t) const {
  const double radius = beta(t);
  int best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < contexts.size(); ++a) {
    const Eigen::VectorXd& s = contexts[a];
    const double width = std::sqrt(std::max(0.0, s.dot(state_.V_inv_bar * s)));
    const double index = state_.theta_hat.dot(s) + radius * width;
    if (index > best_index) {
      best_index = index;
      best = static_cast<int>(a);
    }
  }
  return best;
}

void PlainLinUcb::recompute(int t) {
  state_.V_inv_bar = state_.V.inverse();
  state_.theta_hat = state_.V_inv_bar * state_.b;
  state_.det_bar = state_.V.determinant();
  state_.trace_acc = 0.0;
  state_.t_last_update = t;
  ++state_.update_count;
}

bool PlainLinUcb::observe(const Eigen::VectorXd& s, double r, int t) {
  state_.V += s * s.transpose();
  state_.b += r * s;
  switch (rule_) {
    case SwitchRule::kNone:
      recompute(t);
      return true;
    case SwitchRule::kDeterminant: {
      if (state_.V.determinant() >= (1.0 + cfg_.trace_threshold) * state_.det_bar) {
        recompute(t);
        return true;
      }
      return false;
    }
    case SwitchRule::kTrace: {
      state_.trace_acc += s.dot(state_.V_inv_bar * s);
      if (state_.trace_acc >= cfg_.trace_threshold) {
        recompute(t);
        return true;
      }
      return false;
    }
  }
  return false;
}

}  // namespace helba::bandit
