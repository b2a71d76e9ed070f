#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drr/optimizers.hpp"

namespace drr {

struct ReferenceSolution {
  Eigen::VectorXd x_star;
  double f_star = 0.0;       // f(x_star); global minimum for strongly convex kinds
  double grad_norm = 0.0;    // ||grad f(x_star)||
  int iterations = 0;
  bool exact = true;         // false: nonconvex multi-start, f_star is an estimate
};

// Full-gradient descent with stepsize 1/L to ||grad f|| <= tol. Quadratics are
// additionally solved in closed form and cross-checked to 1e-9 (the closed
// form is returned). Nonconvex kinds run a deterministic multi-start and
// return the best stationary point found (exact = false).
ReferenceSolution reference_solve(const FiniteSumProblem& prob, double tol = 1e-12,
                                  int max_iters = 2000000);

// sigma_*^2 = (1/(n m)) sum_{i,l} ||grad f_{i,l}(x_star)||^2
double sigma_star_sq(const FiniteSumProblem& prob, const Eigen::VectorXd& x_star);

// Bregman divergence D_g(y, x) of the agent-averaged component selection
// g = (1/n) sum_i f_{i, comp[i]} evaluated with the gradient anchored at x.
double bregman_gap(const FiniteSumProblem& prob, const std::vector<int>& comp,
                   const Eigen::VectorXd& y, const Eigen::VectorXd& x);

struct SigmaShuffleEstimate {
  double estimate = 0.0;   // max over l of the mean epoch-l gap
  double mc_stderr = 0.0;  // 0 when exact
  bool exact = false;      // true: full enumeration over permutation profiles
  int argmax_l = 0;
  std::vector<double> per_l;
};

// Shuffling variance at stepsize alpha: max_l E[ D_{s_l}(limit_point_l, x*) ]
// over independent per-agent permutations. Exhaustive enumeration when
// (m!)^n <= enumeration_budget, Monte Carlo with n_mc draws otherwise.
SigmaShuffleEstimate sigma_shuffle_estimate(const FiniteSumProblem& prob,
                                            const Eigen::VectorXd& x_star,
                                            double alpha, int n_mc,
                                            std::uint64_t seed,
                                            std::int64_t enumeration_budget = 10000);

// H = ||avg(x) - x_bar_star||^2 + omega * ||x - 1 avg(x)||_F^2
double lyapunov_H(const AgentStateBlock& state, const Eigen::VectorXd& x_bar_star,
                  double omega);

// Q = f(avg(x)) - f_bar + 16 alpha L^2 / (n (1-rho^2)^2) * ||x - 1 avg(x)||_F^2
double lyapunov_Q(const FiniteSumProblem& prob, const AgentStateBlock& state,
                  double f_bar, double alpha, double rho);

// Trajectory metric recording at epoch boundaries. Supported names:
//   dist_sq        (1/n) sum_i ||x_i - x*||^2
//   consensus_sq   ||x - 1 avg(x)||_F^2
//   grad_norm_sq   ||grad f(avg(x))||^2
//   f_gap          f(avg(x)) - f_bar
//   lyapunov_h     distance-to-limit-sequence Lyapunov value at the boundary
//   lyapunov_q     descent-plus-consensus Lyapunov value
const std::vector<std::string>& metric_names();
bool metric_needs_reference(const std::string& name);

struct MetricSample {
  int epoch = 0;
  std::vector<double> values;  // aligned with the requested metric list
};

struct TrajectoryOptions {
  std::vector<std::string> metrics = {"dist_sq", "consensus_sq", "grad_norm_sq", "f_gap"};
  double rho = 0.0;                      // mixing spectral norm, for lyapunov metrics
  const InnerObserver* observer = nullptr;
};

// Runs `epochs` epochs of `method` from x0 (one row per agent), sampling the
// requested metrics at every epoch boundary (epochs+1 samples). `ref` may be
// null when no selected metric needs it. Throws DivergenceError as the
// iterates do.
std::vector<MetricSample> run_trajectory(Method method, const FiniteSumProblem& prob,
                                         const MixingMatrix& mix,
                                         const StepsizeSchedule& sched, int epochs,
                                         const Eigen::MatrixXd& x0, std::uint64_t seed,
                                         const ReferenceSolution* ref,
                                         const TrajectoryOptions& opts = {});

}  // namespace drr
