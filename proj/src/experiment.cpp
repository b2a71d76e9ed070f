#include "drr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "drr/rng.hpp"

namespace drr {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TopologySpec read_graph_spec(ConfigReader& r) {
  TopologySpec spec;
  spec.kind = topology_from_name(r.require_string("graph.kind"));
  spec.n = r.get_int("graph.n", 0);
  if (spec.n < 1) throw ConfigError("config: 'graph.n' must be a positive integer");
  if (spec.kind == TopologyKind::grid) {
    spec.rows = r.get_int("graph.rows", 0);
    spec.cols = r.get_int("graph.cols", 0);
    if (spec.rows < 1 || spec.cols < 1 || spec.rows * spec.cols != spec.n)
      throw ConfigError(
          "config: grid topology needs 'graph.rows' and 'graph.cols' with rows*cols == n");
  }
  if (spec.kind == TopologyKind::erdos_renyi) {
    spec.edge_prob = r.get_double("graph.prob", 0.0);
    if (!(spec.edge_prob > 0.0 && spec.edge_prob <= 1.0))
      throw ConfigError("config: 'graph.prob' must lie in (0, 1]");
    spec.seed = r.get_u64("graph.seed", 7);
  }
  return spec;
}

FiniteSumProblem read_problem_spec(ConfigReader& r, int n) {
  const std::string kind_name = r.require_string("problem.kind");
  ProblemKind kind;
  try {
    kind = problem_kind_from_name(kind_name);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: 'problem.kind': ") + e.what());
  }
  const int m = r.get_int("problem.m", 0);
  if (m < 1) throw ConfigError("config: 'problem.m' must be a positive integer");

  if (kind == ProblemKind::quadratic) {
    const int dim = r.get_int("problem.dim", 2);
    const double mu = r.get_double("problem.mu", 1.0);
    const double L = r.get_double("problem.l", 1.0);
    const double het = r.get_double("problem.heterogeneity", 0.0);
    const double noise = r.get_double("problem.noise", 1.0);
    const std::uint64_t pseed = r.get_u64("problem.seed", 11);
    if (dim < 1) throw ConfigError("config: 'problem.dim' must be >= 1");
    if (!(mu > 0.0) || L < mu)
      throw ConfigError("config: quadratic problem needs 0 < problem.mu <= problem.l");
    try {
      return make_quadratic_problem(n, m, dim, mu, L, het, noise, pseed);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: problem: ") + e.what());
    }
  }

  // logistic variants: dataset from CSV or synthetic generator
  LabeledDataset data;
  const std::string dataset = r.get_string("problem.dataset", "synth");
  if (dataset == "synth") {
    const int samples = r.get_int("problem.synth_samples", 0);
    const int dim = r.get_int("problem.dim", 5);
    const double sep = r.get_double("problem.synth_separation", 2.0);
    const std::uint64_t pseed = r.get_u64("problem.seed", 11);
    if (samples < n * m)
      throw ConfigError("config: 'problem.synth_samples' must be >= graph.n * problem.m");
    data = synth_classification(samples, dim, sep, pseed);
  } else {
    try {
      data = load_csv(dataset);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: 'problem.dataset': ") + e.what());
    }
  }
  Partition part;
  try {
    part = heterogeneous_partition(data, n, m);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: partition: ") + e.what());
  }
  const double coeff = r.get_double(
      kind == ProblemKind::logistic_l2 ? "problem.rho" : "problem.eta", 0.2);
  if (coeff < 0.0) throw ConfigError("config: regularizer coefficient must be >= 0");
  return make_logistic_problem(kind, data, part, coeff);
}

StepsizeSchedule read_schedule(ConfigReader& r, const FiniteSumProblem& prob,
                               std::vector<std::string>& warnings, double rho) {
  const std::string kind = r.get_string("optimizer.schedule.kind", "constant");
  StepsizeSchedule sched;
  if (kind == "constant") {
    const double alpha = r.get_double("optimizer.schedule.alpha", 0.0);
    if (!(alpha > 0.0))
      throw ConfigError("config: constant schedule needs 'optimizer.schedule.alpha' > 0");
    sched = StepsizeSchedule::constant(alpha);
  } else if (kind == "theorem1") {
    if (!prob.strongly_convex() || !(prob.mu > 0.0))
      throw ConfigError("config: theorem1 schedule needs a strongly convex problem");
    const double theta = r.get_double("optimizer.schedule.theta", 0.0);
    if (!(theta > 0.0))
      throw ConfigError("config: theorem1 schedule needs 'optimizer.schedule.theta' > 0");
    double k = r.get_double("optimizer.schedule.k", 0.0);
    const double k_min = theorem1_k_min(theta, rho, prob.L, prob.mu, prob.m);
    if (k <= 0.0) k = k_min;  // auto: smallest admissible burn-in
    sched = StepsizeSchedule::theorem1(theta, k, prob.m, prob.mu);
    if (theta <= 12.0)
      warnings.push_back("schedule kind 'theorem1' assumes theta > 12; got " +
                         fmt_double(theta) + " (proceeding)");
    if (k < k_min)
      warnings.push_back("theorem1 burn-in K = " + fmt_double(k) +
                         " is below the derived bound " + fmt_double(k_min) +
                         " (proceeding)");
  } else if (kind == "hyperbolic") {
    const double a = r.get_double("optimizer.schedule.a", 0.0);
    const double b = r.get_double("optimizer.schedule.b", 0.0);
    if (!(b > 0.0) || a < 0.0)
      throw ConfigError("config: hyperbolic schedule needs 'a' >= 0 and 'b' > 0");
    sched = StepsizeSchedule::hyperbolic(a, b);
  } else {
    throw ConfigError("config: unknown 'optimizer.schedule.kind': " + kind +
                      " (expected constant | theorem1 | hyperbolic)");
  }

  if (prob.strongly_convex() && prob.mu > 0.0) {
    const auto rep = check_admissible(sched, rho, prob.L, prob.mu, prob.m);
    if (!rep.admissible)
      warnings.push_back("stepsize alpha0 = " + fmt_double(rep.alpha0) +
                         " exceeds the admissible threshold " + fmt_double(rep.threshold) +
                         " (binding: " + rep.binding + "); proceeding");
  }
  return sched;
}

nlohmann::json node_to_json(const ConfigNode& node) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : node.values) j[k] = v;
  for (const auto& [k, child] : node.children) j[k] = node_to_json(child);
  return j;
}

}  // namespace

ResolvedExperiment validate_config(const ConfigNode& root) {
  ConfigReader r(root);
  ResolvedExperiment rx;

  rx.cfg.seed = r.get_u64("seed", 1);
  if (const char* env = std::getenv("DRR_MASTER_SEED")) {
    try {
      rx.cfg.seed = static_cast<std::uint64_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw ConfigError("DRR_MASTER_SEED must be a nonnegative integer");
    }
  }
  rx.cfg.reps = r.get_int("reps", 1);
  if (rx.cfg.reps < 1) throw ConfigError("config: 'reps' must be >= 1");
  rx.cfg.threads = r.get_int("threads", 0);
  if (rx.cfg.threads < 0) throw ConfigError("config: 'threads' must be >= 0");
  rx.cfg.output = r.get_string("output", "");

  const TopologySpec gspec = read_graph_spec(r);
  rx.graph = build_graph(gspec);
  rx.mix = metropolis_weights(rx.graph);
  rx.problem = read_problem_spec(r, gspec.n);

  auto method_names = r.get_list("optimizer.method");
  if (method_names.empty())
    throw ConfigError("config: missing required key 'optimizer.method'");
  for (const auto& name : method_names) {
    try {
      rx.cfg.methods.push_back(method_from_name(name));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: 'optimizer.method': ") + e.what());
    }
  }
  rx.cfg.epochs = r.get_int("optimizer.epochs", 0);
  if (rx.cfg.epochs < 1) throw ConfigError("config: 'optimizer.epochs' must be >= 1");
  const std::string init = r.get_string("optimizer.init", "shared");
  if (init == "shared")
    rx.cfg.per_agent_init = false;
  else if (init == "per_agent")
    rx.cfg.per_agent_init = true;
  else
    throw ConfigError("config: 'optimizer.init' must be shared | per_agent");
  rx.cfg.init_scale = r.get_double("optimizer.init_scale", 1.0);

  rx.schedule = read_schedule(r, rx.problem, rx.warnings, rx.mix.rho);

  rx.cfg.metrics = r.get_list("metrics");
  if (rx.cfg.metrics.empty()) {
    rx.cfg.metrics = {"consensus_sq", "grad_norm_sq", "f_gap"};
    if (rx.problem.strongly_convex()) rx.cfg.metrics.insert(rx.cfg.metrics.begin(), "dist_sq");
  }
  const auto& known = metric_names();
  for (const auto& name : rx.cfg.metrics) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      std::string list;
      for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
      throw ConfigError("config: unknown metric '" + name + "' (expected one of " + list + ")");
    }
    if ((name == "dist_sq" || name == "lyapunov_h") && !rx.problem.strongly_convex())
      throw ConfigError("config: metric '" + name +
                        "' needs a strongly convex problem (no unique minimizer otherwise)");
  }

  const auto stray = r.unconsumed();
  if (!stray.empty()) {
    std::string msg = "config: unknown key(s):";
    for (const auto& s : stray) msg += " '" + s + "'";
    throw ConfigError(msg);
  }
  rx.cfg.echo = node_to_json(root);
  return rx;
}

std::string format_csv(const std::vector<std::string>& metrics,
                       const std::vector<std::vector<std::vector<double>>>& values) {
  std::ostringstream out;
  const int reps = values.empty() || values[0].empty()
                       ? 0
                       : static_cast<int>(values[0][0].size());
  out << "epoch,metric,mean,stderr";
  for (int rr = 0; rr < reps; ++rr) out << ",rep" << rr;
  out << "\n";
  const int rows = values.empty() ? 0 : static_cast<int>(values[0].size());
  for (int t = 0; t < rows; ++t) {
    for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
      const auto& per_rep = values[mi][t];
      double mean = 0.0;
      for (double v : per_rep) mean += v;
      mean /= static_cast<double>(per_rep.size());
      double se = 0.0;
      if (per_rep.size() > 1) {
        double ss = 0.0;
        for (double v : per_rep) ss += (v - mean) * (v - mean);
        se = std::sqrt(ss / (per_rep.size() - 1) / per_rep.size());
      }
      out << t << "," << metrics[mi] << "," << fmt_double(mean) << "," << fmt_double(se);
      for (double v : per_rep) out << "," << fmt_double(v);
      out << "\n";
    }
  }
  return out.str();
}

ExperimentResult run_experiment(const ResolvedExperiment& rx) {
  const auto& cfg = rx.cfg;
  ExperimentResult result;
  result.rho = rx.mix.rho;

  // The sidecar always reports f*, sigma_*^2, so solve unconditionally.
  result.ref = reference_solve(rx.problem);
  result.sigma_star = sigma_star_sq(rx.problem, result.ref.x_star);

  // One initial point for every method and repetition, drawn once from the
  // master seed (rows identical unless per-agent initialization is on).
  rng::Stream init(rng::derive(cfg.seed, rng::kTagInit));
  Eigen::MatrixXd x0(rx.problem.n, rx.problem.p);
  if (cfg.per_agent_init) {
    for (int i = 0; i < rx.problem.n; ++i)
      for (int q = 0; q < rx.problem.p; ++q)
        x0(i, q) = cfg.init_scale * init.next_gaussian();
  } else {
    Eigen::RowVectorXd row(rx.problem.p);
    for (int q = 0; q < rx.problem.p; ++q) row(q) = cfg.init_scale * init.next_gaussian();
    x0.rowwise() = row;
  }

  int workers = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  TrajectoryOptions opts;
  opts.metrics = cfg.metrics;
  opts.rho = rx.mix.rho;

  for (Method method : cfg.methods) {
    const auto t0 = std::chrono::steady_clock::now();
    MethodSeries series;
    series.method = method;
    series.values.assign(cfg.metrics.size(),
                         std::vector<std::vector<double>>(
                             cfg.epochs + 1, std::vector<double>(cfg.reps, 0.0)));

    // Pre-derived per-rep seeds; results land in rep-indexed slots, so the
    // fan-out width cannot affect output bytes.
    auto run_rep = [&](int rep) {
      const auto traj =
          run_trajectory(method, rx.problem, rx.mix, rx.schedule, cfg.epochs, x0,
                         rng::derive(cfg.seed, rng::kTagRep, static_cast<std::uint64_t>(rep)),
                         &result.ref, opts);
      for (int t = 0; t <= cfg.epochs; ++t)
        for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi)
          series.values[mi][t][rep] = traj[t].values[mi];
    };

    for (int base = 0; base < cfg.reps; base += workers) {
      const int chunk = std::min(workers, cfg.reps - base);
      std::vector<std::future<void>> futs;
      futs.reserve(chunk);
      for (int k = 0; k < chunk; ++k)
        futs.push_back(std::async(std::launch::async, run_rep, base + k));
      for (auto& f : futs) f.get();
    }
    series.wall_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!cfg.output.empty()) {
      const bool single = cfg.methods.size() == 1;
      const std::string stem =
          single ? cfg.output : cfg.output + "." + method_name(method);
      series.csv_path = stem + ".csv";
      series.json_path = stem + ".json";
      const auto parent = std::filesystem::path(stem).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      std::ofstream csv(series.csv_path, std::ios::binary);
      if (!csv) throw std::runtime_error("cannot write " + series.csv_path);
      csv << format_csv(cfg.metrics, series.values);

      nlohmann::json side;
      side["method"] = method_name(method);
      side["config"] = cfg.echo;
      side["rho_w"] = rx.mix.rho;
      side["mu"] = rx.problem.mu;
      side["L"] = rx.problem.L;
      side["sigma_star_sq"] = result.sigma_star;
      side["f_star"] = result.ref.f_star;
      side["reference_exact"] = result.ref.exact;
      side["reps"] = cfg.reps;
      side["epochs"] = cfg.epochs;
      side["seed"] = cfg.seed;
      side["wall_time_sec"] = series.wall_sec;
      side["warnings"] = rx.warnings;
      std::ofstream js(series.json_path, std::ios::binary);
      if (!js) throw std::runtime_error("cannot write " + series.json_path);
      js << side.dump(2) << "\n";
    }
    result.series.push_back(std::move(series));
  }
  return result;
}

}  // namespace drr
