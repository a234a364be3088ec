#pragma once

#include <Eigen/Dense>
#include <vector>

#include "helba/bandit/config.hpp"

namespace helba::bandit {

enum class SwitchRule {
  kNone,        // recompute every step (the standard optimistic baseline)
  kDeterminant, // recompute when det(V_t) >= (1+C) det(V at last update)
  kTrace,       // recompute when sum ||s||^2 in the frozen inverse norm >= C
};

// Exact ridge statistics plus the frozen policy of the rare-switching
// variants.
struct PlainLinUcbState {
  Eigen::MatrixXd V;          // lambda I + sum s s^T, exact
  Eigen::VectorXd b;          // sum r s
  Eigen::MatrixXd V_inv_bar;  // inverse frozen at the last update
  Eigen::VectorXd theta_hat;  // estimate frozen at the last update
  double det_bar = 0.0;       // det(V) at the last update
  double trace_acc = 0.0;     // sum of frozen-norm context norms since the update
  int t_last_update = 1;
  int update_count = 0;

  explicit PlainLinUcbState(const BanditConfig& cfg);
};

class PlainLinUcb {
 public:
  PlainLinUcb(const BanditConfig& cfg, SwitchRule rule);

  // Picks the index-maximizing arm (ties to the lowest index).
  int select_arm(const std::vector<Eigen::VectorXd>& contexts, int t) const;

  // Rank-one update; refreshes the frozen policy when the rule fires.
  // Returns true when an update happened this step.
  bool observe(const Eigen::VectorXd& s, double r, int t);

  const PlainLinUcbState& state() const { return state_; }

  // Radius used for the index: the confidence radius without the
  // encryption-inflation term (isolates the cost of encryption in
  // comparisons).
  double beta(int t) const;

 private:
  void recompute(int t);

  BanditConfig cfg_;
  SwitchRule rule_;
  PlainLinUcbState state_;
};

}  // namespace helba::bandit
