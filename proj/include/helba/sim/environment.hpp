#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "helba/bandit/config.hpp"

namespace helba::sim {

struct EnvironmentConfig {
  int context_sets = 4;         // pool size, cycled deterministically per step
  double context_radius = 1.0;  // contexts drawn uniformly from this ball
  double theta_norm = 1.0;      // ||theta*||; also the default S
  std::uint64_t seed = 12345;   // pool and theta* derive from this
};

// Fixed context pool plus the hidden parameter. Rewards are
// <s, theta*> + N(0, sigma^2), clipped to [-1, 1].
class Environment {
 public:
  Environment(const bandit::BanditConfig& cfg, const EnvironmentConfig& env_cfg);

  // Explicit pool and parameter, for handcrafted problem instances.
  Environment(std::vector<std::vector<Eigen::VectorXd>> pool, Eigen::VectorXd theta_star, double sigma);

  const std::vector<Eigen::VectorXd>& contexts_at(int t) const;
  const Eigen::VectorXd& theta_star() const { return theta_star_; }

  double mean_reward(const Eigen::VectorXd& s) const { return theta_star_.dot(s); }
  double sample_reward(const Eigen::VectorXd& s, std::mt19937_64& rng) const;

  int best_arm(int t) const;
  double best_mean(int t) const;

 private:
  double sigma_;
  Eigen::VectorXd theta_star_;
  std::vector<std::vector<Eigen::VectorXd>> pool_;
};

}  // namespace helba::sim
