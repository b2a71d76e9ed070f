#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drr/metrics.hpp"

namespace drr {

struct CheckResult {
  std::string check;
  nlohmann::json params;
  nlohmann::json measured;
  bool pass = false;
  std::string note;

  nlohmann::json to_json() const;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double half_width = 0.0;  // 1.96 * stderr_slope
  int points = 0;
};

// Least-squares slope of log(v) against log(x). Throws if any value is
// nonpositive or fewer than 3 points are given.
RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& v);

// ||W w - 1 w_bar||_F <= rho ||w - 1 w_bar||_F (+1e-9) over random states.
CheckResult check_contraction(const MixingMatrix& mix, int n_states, int p,
                              std::uint64_t seed);

// alpha^2 mu m / 8 * sigma*^2 <= sigma_shuffle^2 <= alpha^2 L m / 4 * sigma*^2,
// allowing 3 Monte Carlo standard errors on the estimate.
CheckResult check_variance_sandwich(const FiniteSumProblem& prob,
                                    const ReferenceSolution& ref, double alpha,
                                    int n_mc, std::uint64_t seed);

// Constant-stepsize error floor at alpha vs alpha_second (default alpha/2):
// plateau ratio in [3, 6]. Plateau = mean dist_sq over the trailing quarter,
// required to be stable against the preceding quarter. Passing
// alpha_second == alpha is the self-test degenerate case (ratio 1, fails).
CheckResult check_floor_scaling(const FiniteSumProblem& prob, const MixingMatrix& mix,
                                Method method, double alpha, int epochs, int reps,
                                std::uint64_t seed, double alpha_second = 0.0);

// Consensus-error plateau vs stepsize on a >=3 point grid: log-log slope in
// [1.6, 2.4]. Reports an exact-consensus verdict instead when the plateaus
// sit at machine epsilon (complete graph).
CheckResult check_consensus_scaling(const FiniteSumProblem& prob,
                                    const MixingMatrix& mix, Method method,
                                    const std::vector<double>& alphas, int epochs,
                                    int reps, std::uint64_t seed);

// Empirical mean of the epoch-boundary Lyapunov function vs the one-epoch
// recursion bound built from measured sigma_shuffle^2 and sigma_*^2; requires
// the bound to hold for >= 95% of epochs with 3-standard-error slack.
CheckResult check_H_recursion(const FiniteSumProblem& prob, const MixingMatrix& mix,
                              double alpha, int epochs, int reps, int n_mc,
                              std::uint64_t seed);

}  // namespace drr
