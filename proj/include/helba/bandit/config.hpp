#pragma once

#include <string>

namespace helba::bandit {

struct BanditConfig {
  int horizon = 130;            // T
  int num_arms = 2;             // K
  int dim = 2;                  // d
  double lambda = 1.0;          // ridge regularizer
  double delta = 0.05;          // failure probability
  double feature_bound = 5.5;   // L, ||s|| <= L with L >= 1
  double param_bound = 1.0;     // S, ||theta*|| <= S
  double sigma = 0.5;           // reward noise scale
  double trace_threshold = 1.0; // C
  double eta = 0.1;             // geometric batch growth
  double r_min = -1.0;
  double r_max = 1.0;
  // Confidence radius with the per-dimension log term ln(1 + L^2 t/(lambda d));
  // when false the plain-lambda variant is used instead.
  bool beta_uses_lambda_d = true;
  // New batch starts the step after the trigger fired. The alternative
  // (start at the trigger step itself) roughly halves batch lengths early on.
  bool batch_start_next_step = true;

  // Throws ConfigError on structural violations.
  void validate() const;

  // C - L*eta/sqrt(lambda + L^2) > 1/4; a warning, not an error.
  bool batch_bound_hypothesis_holds() const;

  // 1 + d ln(1 + L^2 T/(lambda d)) / (2 ln(3/4 + C - L eta/sqrt(lambda+L^2)))
  //   + ln T / ln(1 + eta)
  double batch_count_bound() const;
};

// Confidence radius: t_j^{-1/2} + S sqrt(lambda)
//   + sigma sqrt(d (ln(1 + L^2 t_j/(lambda d)) + ln(pi^2 t^2/(6 delta)))),
// design-matrix terms evaluated at the batch start t_j.
double beta_tilde(int t, int t_j, const BanditConfig& cfg);

// Newton target for batch starting at t_j: (L t_j^{3/2} sqrt(lambda + L^2 t_j))^-1.
double inverse_epsilon(int t_j, const BanditConfig& cfg);

// Upper end of the index range used for rescaling into [0,1]:
// r_max + 2 beta [2/t + L sqrt(1/lambda + 1/sqrt(lambda)) + sqrt(L/(t^{3/2} sqrt(lambda+L^2 t)))].
double rho_max_bound(int t, double beta, const BanditConfig& cfg);

}  // namespace helba::bandit
