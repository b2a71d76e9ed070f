#include "drr/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "drr/rng.hpp"

// Canonical desk-scale check suites. Instances are pinned so verdicts are
// reproducible; sizes are chosen to finish on a laptop while leaving the
// measured effects well above Monte Carlo noise.

namespace drr {

namespace {

Eigen::MatrixXd shared_init(int n, int p, std::uint64_t seed, double scale) {
  rng::Stream s(rng::derive(seed, rng::kTagInit));
  Eigen::RowVectorXd row(p);
  for (int q = 0; q < p; ++q) row(q) = scale * s.next_gaussian();
  Eigen::MatrixXd x0(n, p);
  x0.rowwise() = row;
  return x0;
}

// mean over reps of a single metric, per epoch
std::vector<double> mean_metric(Method method, const FiniteSumProblem& prob,
                                const MixingMatrix& mix, const StepsizeSchedule& sched,
                                int epochs, const Eigen::MatrixXd& x0, int reps,
                                std::uint64_t seed, const std::string& metric,
                                const ReferenceSolution* ref) {
  TrajectoryOptions opts;
  opts.metrics = {metric};
  opts.rho = mix.rho;
  std::vector<double> mean(epochs + 1, 0.0);
  for (int rep = 0; rep < reps; ++rep) {
    const auto traj = run_trajectory(method, prob, mix, sched, epochs, x0,
                                     rng::derive(seed, rng::kTagRep, rep), ref, opts);
    for (int t = 0; t <= epochs; ++t) mean[t] += traj[t].values[0];
  }
  for (auto& v : mean) v /= reps;
  return mean;
}

// The strongly convex workhorse: ring of 8 agents, 8 quadratic components
// each, kappa = 1 spectrum with wide component spread. Small condition number
// keeps the decreasing-schedule burn-in K modest, so the reshuffling-noise
// regime is reached well inside the epoch budget.
struct ScvxInstance {
  FiniteSumProblem prob;
  MixingMatrix mix;
};

ScvxInstance canonical_scvx(std::uint64_t seed) {
  ScvxInstance inst;
  inst.prob = make_quadratic_problem(/*n=*/8, /*m=*/8, /*p=*/16, /*mu=*/1.0, /*L=*/1.0,
                                     /*heterogeneity=*/0.0, /*noise=*/8.0,
                                     rng::derive(seed, rng::kTagProblem, 100));
  TopologySpec ts;
  ts.kind = TopologyKind::ring;
  ts.n = 8;
  inst.mix = metropolis_weights(build_graph(ts));
  return inst;
}

std::vector<CheckResult> suite_contraction(std::uint64_t seed) {
  std::vector<CheckResult> out;
  for (int n : {4, 16}) {
    for (auto kind : {TopologyKind::complete, TopologyKind::ring, TopologyKind::grid,
                      TopologyKind::exponential, TopologyKind::erdos_renyi}) {
      TopologySpec ts;
      ts.kind = kind;
      ts.n = n;
      if (kind == TopologyKind::grid) {
        ts.rows = (n == 4) ? 2 : 4;
        ts.cols = n / ts.rows;
      }
      if (kind == TopologyKind::erdos_renyi) {
        ts.edge_prob = 0.8;
        ts.seed = seed;
      }
      const auto mix = metropolis_weights(build_graph(ts));
      auto r = check_contraction(mix, 1000, 3, rng::derive(seed, rng::kTagCheck, n));
      r.params["topology"] = topology_name(kind);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<CheckResult> suite_sandwich(std::uint64_t seed) {
  // Spread spectrum (kappa = 10) with homogeneous agent centers: both sides
  // of the shuffling-variance sandwich hold with real margin.
  auto prob = make_quadratic_problem(4, 4, 2, 1.0, 10.0, 0.0, 1.0,
                                     rng::derive(seed, rng::kTagProblem, 200));
  const auto ref = reference_solve(prob);
  std::vector<CheckResult> out;
  for (double alpha : {1e-2, 1e-3})
    out.push_back(check_variance_sandwich(prob, ref, alpha, 2000,
                                          rng::derive(seed, rng::kTagCheck, 17)));
  return out;
}

std::vector<CheckResult> suite_rates_scvx(std::uint64_t seed) {
  auto inst = canonical_scvx(seed);
  const auto ref = reference_solve(inst.prob);
  const double theta = 16.0;
  const double k = theorem1_k_min(theta, inst.mix.rho, inst.prob.L, inst.prob.mu,
                                  inst.prob.m);
  const auto sched = StepsizeSchedule::theorem1(theta, k, inst.prob.m, inst.prob.mu);
  const int T = 2000, R = 10;
  const auto x0 = shared_init(inst.prob.n, inst.prob.p, seed, 1.0);

  std::vector<CheckResult> out;
  struct Case { Method method; double lo, hi; };
  for (const Case c : {Case{Method::drr, -2.3, -1.7}, Case{Method::dsgd, -1.3, -0.7}}) {
    const auto mean = mean_metric(c.method, inst.prob, inst.mix, sched, T, x0, R, seed,
                                  "dist_sq", &ref);
    std::vector<double> xs, vs;
    for (int t = T / 2; t <= T; ++t) {
      xs.push_back(static_cast<double>(t) + k);  // schedule clock, not epoch index
      vs.push_back(mean[t]);
    }
    const auto fit = fit_rate(xs, vs);
    CheckResult r;
    r.check = "rate_scvx";
    r.params = {{"method", method_name(c.method)}, {"theta", theta}, {"k", k},
                {"epochs", T},                     {"reps", R},
                {"window", {T / 2, T}},            {"expected", {c.lo, c.hi}}};
    r.measured = {{"slope", fit.slope}, {"half_width", fit.half_width}};
    r.pass = fit.slope >= c.lo && fit.slope <= c.hi;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> suite_rates_ncvx(std::uint64_t seed) {
  // Small batches and weak class separation keep the gradient dispersion at
  // stationarity high enough that every horizon reaches its stepsize-limited
  // plateau; best-so-far is read off the repetition-mean curve so the min
  // statistic tracks the plateau level rather than excursions below it.
  const auto data = synth_classification(128, 16, 0.5, rng::derive(seed, rng::kTagProblem, 300));
  const auto part = heterogeneous_partition(data, 8, 8);
  const auto prob = make_logistic_problem(ProblemKind::logistic_sigmoidal, data, part, 0.2);
  TopologySpec ts;
  ts.kind = TopologyKind::grid;
  ts.n = 8;
  ts.rows = 2;
  ts.cols = 4;
  const auto mix = metropolis_weights(build_graph(ts));
  const auto ref = reference_solve(prob);
  const auto x0 = shared_init(prob.n, prob.p, seed, 1.0);

  const int R = 10;
  const double c_step = 1.5;  // alpha(T) = c / (m T^{1/3})
  std::vector<double> ts_axis, vals;
  for (int T : {200, 400, 800, 1600}) {
    const double alpha = c_step / (prob.m * std::cbrt(static_cast<double>(T)));
    const auto sched = StepsizeSchedule::constant(alpha);
    const auto mean = mean_metric(Method::drr, prob, mix, sched, T, x0, R, seed,
                                  "grad_norm_sq", &ref);
    double best = mean[0];
    for (double v : mean) best = std::min(best, v);
    ts_axis.push_back(static_cast<double>(T));
    vals.push_back(best);
  }
  const auto fit = fit_rate(ts_axis, vals);
  CheckResult r;
  r.check = "rate_ncvx";
  r.params = {{"c_step", c_step}, {"reps", R}, {"horizons", {200, 400, 800, 1600}},
              {"expected", {-0.9, -0.45}}};
  r.measured = {{"slope", fit.slope}, {"half_width", fit.half_width},
                {"best_grad_norm_sq", vals}};
  r.pass = fit.slope >= -0.9 && fit.slope <= -0.45;
  return {r};
}

std::vector<CheckResult> suite_floors(std::uint64_t seed) {
  auto inst = canonical_scvx(seed);
  return {check_floor_scaling(inst.prob, inst.mix, Method::drr, 0.008, 4000, 5, seed)};
}

std::vector<CheckResult> suite_consensus(std::uint64_t seed) {
  auto inst = canonical_scvx(seed);
  return {check_consensus_scaling(inst.prob, inst.mix, Method::drr,
                                  {0.008, 0.004, 0.002}, 4000, 5, seed)};
}

std::vector<CheckResult> suite_lyapunov(std::uint64_t seed) {
  auto inst = canonical_scvx(seed);
  return {check_H_recursion(inst.prob, inst.mix, 0.008, 400, 20, 2000, seed)};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "contraction", "sandwich", "rates_scvx", "rates_ncvx",
      "floors",      "consensus", "lyapunov"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "contraction") return suite_contraction(seed);
  if (name == "sandwich") return suite_sandwich(seed);
  if (name == "rates_scvx") return suite_rates_scvx(seed);
  if (name == "rates_ncvx") return suite_rates_ncvx(seed);
  if (name == "floors") return suite_floors(seed);
  if (name == "consensus") return suite_consensus(seed);
  if (name == "lyapunov") return suite_lyapunov(seed);
  std::string list;
  for (const auto& s : suite_names()) list += (list.empty() ? "" : ", ") + s;
  throw std::invalid_argument("unknown suite '" + name + "' (available: " + list + ")");
}

}  // namespace drr
