#include "helba/sim/environment.hpp"

#include <algorithm>
#include <cmath>

#include "helba/he/errors.hpp"

namespace helba::sim {

namespace {
Eigen::VectorXd uniform_ball(int dim, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
  v.normalize();
  return radius * std::pow(uni(rng), 1.0 / dim) * v;
}
}  // namespace

Environment::Environment(const bandit::BanditConfig& cfg, const EnvironmentConfig& env_cfg)
    : sigma_(cfg.sigma) {
  if (env_cfg.context_sets < 1) throw ConfigError("environment needs at least one context set");
  if (!(env_cfg.context_radius > 0.0) || env_cfg.context_radius > cfg.feature_bound)
    throw ConfigError("context radius must lie in (0, L]");
  if (env_cfg.theta_norm > cfg.param_bound)
    throw ConfigError("theta norm exceeds the configured bound S");
  std::mt19937_64 rng(env_cfg.seed);
  theta_star_ = uniform_ball(cfg.dim, 1.0, rng);
  theta_star_.normalize();
  theta_star_ *= env_cfg.theta_norm;
  pool_.resize(static_cast<std::size_t>(env_cfg.context_sets));
  for (auto& set : pool_) {
    set.reserve(static_cast<std::size_t>(cfg.num_arms));
    for (int a = 0; a < cfg.num_arms; ++a) set.push_back(uniform_ball(cfg.dim, env_cfg.context_radius, rng));
  }
}

Environment::Environment(std::vector<std::vector<Eigen::VectorXd>> pool, Eigen::VectorXd theta_star,
                         double sigma)
    : sigma_(sigma), theta_star_(std::move(theta_star)), pool_(std::move(pool)) {
  if (pool_.empty() || pool_[0].empty()) throw ConfigError("environment needs at least one context set");
}

const std::vector<Eigen::VectorXd>& Environment::contexts_at(int t) const {
  return pool_[static_cast<std::size_t>((t - 1) % static_cast<int>(pool_.size()))];
}

double Environment::sample_reward(const Eigen::VectorXd& s, std::mt19937_64& rng) const {
  std::normal_distribution<double> noise(0.0, sigma_);
  const double r = mean_reward(s) + (sigma_ > 0.0 ? noise(rng) : 0.0);
  return std::clamp(r, -1.0, 1.0);
}

int Environment::best_arm(int t) const {
  const auto& set = contexts_at(t);
  int best = 0;
  double best_mean = mean_reward(set[0]);
  for (std::size_t a = 1; a < set.size(); ++a) {
    const double m = mean_reward(set[a]);
    if (m > best_mean) {
      best_mean = m;
      best = static_cast<int>(a);
    }
  }
  return best;
}

double Environment::best_mean(int t) const { return mean_reward(contexts_at(t)[static_cast<std::size_t>(best_arm(t))]); }

}  // namespace helba::sim
