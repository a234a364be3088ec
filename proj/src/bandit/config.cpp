#include "helba/bandit/config.hpp"

#include <cmath>
#include <numbers>

#include "helba/he/errors.hpp"

namespace helba::bandit {

void BanditConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (num_arms < 1) throw ConfigError("num_arms must be >= 1");
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  if (!(feature_bound >= 1.0)) throw ConfigError("feature bound L must be >= 1");
  if (!(param_bound >= 0.0)) throw ConfigError("param bound S must be >= 0");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
  if (!(trace_threshold > 0.0)) throw ConfigError("trace threshold C must be > 0");
  if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
  if (!(r_min < r_max)) throw ConfigError("reward range must satisfy r_min < r_max");
}

bool BanditConfig::batch_bound_hypothesis_holds() const {
  return trace_threshold - feature_bound * eta / std::sqrt(lambda + feature_bound * feature_bound) > 0.25;
}

double BanditConfig::batch_count_bound() const {
  const double l2 = feature_bound * feature_bound;
  const double gap = 0.75 + trace_threshold - feature_bound * eta / std::sqrt(lambda + l2);
  const double det_term = dim * std::log(1.0 + l2 * horizon / (lambda * dim)) / (2.0 * std::log(gap));
  return 1.0 + det_term + std::log(static_cast<double>(horizon)) / std::log(1.0 + eta);
}

double beta_tilde(int t, int t_j, const BanditConfig& cfg) {
  const double l2 = cfg.feature_bound * cfg.feature_bound;
  const double denom = cfg.beta_uses_lambda_d ? cfg.lambda * cfg.dim : cfg.lambda;
  const double design = std::log(1.0 + l2 * t_j / denom);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double union_bound = std::log(pi2 * static_cast<double>(t) * t / (6.0 * cfg.delta));
  return 1.0 / std::sqrt(static_cast<double>(t_j)) + cfg.param_bound * std::sqrt(cfg.lambda) +
         cfg.sigma * std::sqrt(cfg.dim * (design + union_bound));
}

double inverse_epsilon(int t_j, const BanditConfig& cfg) {
  const double tj = static_cast<double>(t_j);
  return 1.0 / (cfg.feature_bound * std::pow(tj, 1.5) *
                std::sqrt(cfg.lambda + cfg.feature_bound * cfg.feature_bound * tj));
}

double rho_max_bound(int t, double beta, const BanditConfig& cfg) {
  const double l = cfg.feature_bound;
  const double td = static_cast<double>(t);
  const double norm_term = l * std::sqrt(1.0 / cfg.lambda + 1.0 / std::sqrt(cfg.lambda));
  const double inv_term = std::sqrt(l / (std::pow(td, 1.5) * std::sqrt(cfg.lambda + l * l * td)));
  return cfg.r_max + 2.0 * beta * (2.0 / td + norm_term + inv_term);
}

}  // namespace helba::bandit
