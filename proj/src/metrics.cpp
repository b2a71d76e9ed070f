#include "drr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "drr/rng.hpp"

namespace drr {

namespace {

ReferenceSolution descend(const FiniteSumProblem& prob, Eigen::VectorXd x, double tol,
                          int max_iters) {
  ReferenceSolution r;
  const double step = 1.0 / prob.L;
  Eigen::VectorXd g(prob.p);
  int it = 0;
  for (; it < max_iters; ++it) {
    prob.full_gradient(x, g);
    if (g.norm() <= tol) break;
    x -= step * g;
  }
  if (it == max_iters)
    throw std::runtime_error("reference_solve: gradient descent failed to reach tolerance");
  r.x_star = x;
  r.f_star = prob.full_value(x);
  r.grad_norm = g.norm();
  r.iterations = it;
  return r;
}

}  // namespace

ReferenceSolution reference_solve(const FiniteSumProblem& prob, double tol, int max_iters) {
  if (prob.kind == ProblemKind::quadratic) {
    // mean of 0.5 x'Qx - b_{i,l}'x has the closed-form minimizer Q^{-1} b_bar
    Eigen::VectorXd b_bar = Eigen::VectorXd::Zero(prob.p);
    for (const auto& c : prob.quads) b_bar += c.b;
    b_bar /= static_cast<double>(prob.quads.size());
    Eigen::VectorXd closed = b_bar.cwiseQuotient(prob.q_diag);

    ReferenceSolution gd = descend(prob, Eigen::VectorXd::Zero(prob.p), tol, max_iters);
    if ((gd.x_star - closed).norm() > 1e-9 * std::max(1.0, closed.norm()))
      throw std::runtime_error("reference_solve: closed form and gradient descent disagree");
    ReferenceSolution r;
    r.x_star = closed;
    r.f_star = prob.full_value(closed);
    r.grad_norm = prob.full_gradient(closed).norm();
    r.iterations = gd.iterations;
    r.exact = true;
    return r;
  }

  if (prob.kind == ProblemKind::logistic_l2)
    return descend(prob, Eigen::VectorXd::Zero(prob.p), tol, max_iters);

  // Nonconvex: deterministic multi-start, keep the best stationary point.
  // f_star is an upper estimate of inf f (flagged via exact = false).
  const double ncvx_tol = std::max(tol, 1e-10);
  std::optional<ReferenceSolution> best;
  for (int s = 0; s < 5; ++s) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(prob.p);
    if (s > 0) {
      rng::Stream st(rng::derive(0x5EEDF00DULL, rng::kTagCheck, static_cast<std::uint64_t>(s)));
      for (int q = 0; q < prob.p; ++q) x0(q) = 2.0 * st.next_gaussian();
    }
    ReferenceSolution r = descend(prob, x0, ncvx_tol, max_iters);
    if (!best || r.f_star < best->f_star) best = r;
  }
  best->exact = false;
  return *best;
}

double sigma_star_sq(const FiniteSumProblem& prob, const Eigen::VectorXd& x_star) {
  double acc = 0.0;
  Eigen::VectorXd g(prob.p);
  for (int i = 0; i < prob.n; ++i)
    for (int l = 0; l < prob.m; ++l) {
      prob.component_gradient(i, l, x_star, g);
      acc += g.squaredNorm();
    }
  return acc / static_cast<double>(prob.n * prob.m);
}

double bregman_gap(const FiniteSumProblem& prob, const std::vector<int>& comp,
                   const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  if (static_cast<int>(comp.size()) != prob.n)
    throw std::invalid_argument("bregman_gap: one component index per agent");
  double acc = 0.0;
  Eigen::VectorXd g(prob.p);
  const Eigen::VectorXd d = y - x;
  for (int i = 0; i < prob.n; ++i) {
    prob.component_gradient(i, comp[i], x, g);
    acc += prob.component_value(i, comp[i], y) - prob.component_value(i, comp[i], x) -
           g.dot(d);
  }
  return acc / static_cast<double>(prob.n);
}

namespace {

double profile_count(int m, int n, std::int64_t budget) {
  double fact = 1.0;
  for (int k = 2; k <= m; ++k) fact *= k;
  double total = 1.0;
  for (int i = 0; i < n; ++i) {
    total *= fact;
    if (total > static_cast<double>(budget) * 4.0) return total;  // early out
  }
  return total;
}

// All m! permutations of [0, m)
std::vector<std::vector<int>> all_permutations(int m) {
  std::vector<int> base(m);
  std::iota(base.begin(), base.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

}  // namespace

SigmaShuffleEstimate sigma_shuffle_estimate(const FiniteSumProblem& prob,
                                            const Eigen::VectorXd& x_star, double alpha,
                                            int n_mc, std::uint64_t seed,
                                            std::int64_t enumeration_budget) {
  const int n = prob.n, m = prob.m;
  std::vector<double> sum(m, 0.0), sumsq(m, 0.0);
  std::int64_t count = 0;

  auto accumulate = [&](const std::vector<std::vector<int>>& perms) {
    const auto pts = limit_points(prob, perms, x_star, alpha);
    std::vector<int> comp(n);
    for (int l = 0; l < m; ++l) {
      for (int i = 0; i < n; ++i) comp[i] = perms[i][l];
      const double d = bregman_gap(prob, comp, pts[l], x_star);
      sum[l] += d;
      sumsq[l] += d * d;
    }
    ++count;
  };

  SigmaShuffleEstimate est;
  const double profiles = profile_count(m, n, enumeration_budget);
  if (profiles <= static_cast<double>(enumeration_budget)) {
    est.exact = true;
    const auto perm_table = all_permutations(m);
    const int pf = static_cast<int>(perm_table.size());
    std::vector<int> odo(n, 0);
    std::vector<std::vector<int>> perms(n);
    for (;;) {
      for (int i = 0; i < n; ++i) perms[i] = perm_table[odo[i]];
      accumulate(perms);
      int pos = n - 1;
      while (pos >= 0 && ++odo[pos] == pf) odo[pos--] = 0;
      if (pos < 0) break;
    }
  } else {
    if (n_mc < 2) throw std::invalid_argument("sigma_shuffle_estimate: n_mc must be >= 2");
    std::vector<std::vector<int>> perms(n, std::vector<int>(m));
    for (int d = 0; d < n_mc; ++d) {
      rng::Stream s(rng::derive(seed, rng::kTagCheck, static_cast<std::uint64_t>(d)));
      for (int i = 0; i < n; ++i) {
        std::iota(perms[i].begin(), perms[i].end(), 0);
        s.shuffle(perms[i]);
      }
      accumulate(perms);
    }
  }

  est.per_l.resize(m);
  for (int l = 0; l < m; ++l) est.per_l[l] = sum[l] / static_cast<double>(count);
  est.argmax_l = static_cast<int>(
      std::max_element(est.per_l.begin(), est.per_l.end()) - est.per_l.begin());
  est.estimate = est.per_l[est.argmax_l];
  if (!est.exact) {
    const int l = est.argmax_l;
    const double mean = est.per_l[l];
    const double var =
        std::max(0.0, sumsq[l] / static_cast<double>(count) - mean * mean);
    est.mc_stderr = std::sqrt(var / static_cast<double>(count));
  }
  return est;
}

double lyapunov_H(const AgentStateBlock& state, const Eigen::VectorXd& x_bar_star,
                  double omega) {
  const Eigen::RowVectorXd avg = state.mean();
  return (avg.transpose() - x_bar_star).squaredNorm() + omega * state.consensus_sq();
}

double lyapunov_Q(const FiniteSumProblem& prob, const AgentStateBlock& state,
                  double f_bar, double alpha, double rho) {
  const Eigen::RowVectorXd avg = state.mean();
  const double gap = 1.0 - rho * rho;
  const double w = 16.0 * alpha * prob.L * prob.L /
                   (static_cast<double>(state.n()) * gap * gap);
  return prob.full_value(avg.transpose()) - f_bar + w * state.consensus_sq();
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "dist_sq", "consensus_sq", "grad_norm_sq", "f_gap", "lyapunov_h", "lyapunov_q"};
  return names;
}

bool metric_needs_reference(const std::string& name) {
  return name == "dist_sq" || name == "f_gap" || name == "lyapunov_h" ||
         name == "lyapunov_q";
}

namespace {

double eval_metric(const std::string& name, const FiniteSumProblem& prob,
                   const AgentStateBlock& state, const ReferenceSolution* ref,
                   double alpha_t, double rho) {
  if (name == "consensus_sq") return state.consensus_sq();
  if (name == "grad_norm_sq")
    return prob.full_gradient(state.mean().transpose()).squaredNorm();
  if (!ref) throw std::invalid_argument("metric " + name + " needs a reference solution");
  if (name == "dist_sq")
    return (state.x.rowwise() - ref->x_star.transpose()).squaredNorm() /
           static_cast<double>(state.n());
  if (name == "f_gap")
    return prob.full_value(state.mean().transpose()) - ref->f_star;
  if (name == "lyapunov_h") {
    if (!(prob.mu > 0.0)) throw std::invalid_argument("lyapunov_h needs strong convexity");
    const double omega = 16.0 * alpha_t * prob.L * prob.L /
                         (static_cast<double>(state.n()) * prob.mu * (1.0 - rho * rho));
    return lyapunov_H(state, ref->x_star, omega);
  }
  if (name == "lyapunov_q") return lyapunov_Q(prob, state, ref->f_star, alpha_t, rho);
  throw std::invalid_argument("unknown metric: " + name);
}

}  // namespace

std::vector<MetricSample> run_trajectory(Method method, const FiniteSumProblem& prob,
                                         const MixingMatrix& mix,
                                         const StepsizeSchedule& sched, int epochs,
                                         const Eigen::MatrixXd& x0, std::uint64_t seed,
                                         const ReferenceSolution* ref,
                                         const TrajectoryOptions& opts) {
  if (x0.rows() != prob.n || x0.cols() != prob.p)
    throw std::invalid_argument("run_trajectory: x0 must be n x p");
  AgentStateBlock state;
  state.x = x0;
  PermutationStream perms{seed, prob.m};

  std::vector<MetricSample> out;
  out.reserve(epochs + 1);
  auto record = [&]() {
    MetricSample s;
    s.epoch = state.epoch;
    s.values.reserve(opts.metrics.size());
    for (const auto& name : opts.metrics)
      s.values.push_back(
          eval_metric(name, prob, state, ref, sched.at(state.epoch), opts.rho));
    out.push_back(std::move(s));
  };

  record();
  for (int t = 0; t < epochs; ++t) {
    run_epoch(method, state, mix, prob, perms, sched, opts.observer);
    record();
  }
  return out;
}

}  // namespace drr
