// Command-line front end: run experiments from config files, run canonical
// check suites, solve reference problems, and inspect graph topologies.
//
// Exit codes: 0 success, 1 config/usage error, 2 divergence, 3 failed check.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "drr/experiment.hpp"
#include "drr/rng.hpp"

namespace {

std::uint64_t seed_with_env(std::uint64_t fallback) {
  if (const char* env = std::getenv("DRR_MASTER_SEED")) {
    try {
      return static_cast<std::uint64_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw drr::ConfigError("DRR_MASTER_SEED must be a nonnegative integer");
    }
  }
  return fallback;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::int64_t seed_override) {
  auto root = drr::parse_config_file(config_path);
  if (seed_override >= 0)
    root.values["seed"] = std::to_string(seed_override);  // env still wins
  auto rx = drr::validate_config(root);
  if (!out_override.empty()) rx.cfg.output = out_override;
  for (const auto& w : rx.warnings) std::cerr << "warning: " << w << "\n";
  if (rx.cfg.output.empty()) rx.cfg.output = "out";

  const auto result = drr::run_experiment(rx);
  for (const auto& s : result.series)
    std::cout << drr::method_name(s.method) << ": wrote " << s.csv_path << " and "
              << s.json_path << " (" << s.wall_sec << " s)\n";
  return 0;
}

int cmd_suite(const std::vector<std::string>& names, const std::string& out_dir,
              std::uint64_t seed) {
  std::vector<std::string> todo = names;
  if (todo.size() == 1 && todo[0] == "all") todo = drr::suite_names();

  bool all_pass = true;
  for (const auto& name : todo) {
    const auto results = drr::run_suite(name, seed);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
      arr.push_back(r.to_json());
      std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << name << "/" << r.check;
      if (!r.params.empty()) std::cout << " " << r.params.dump();
      if (!r.note.empty()) std::cout << " (" << r.note << ")";
      std::cout << "\n";
      all_pass = all_pass && r.pass;
    }
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream out(out_dir + "/" + name + ".json");
      out << arr.dump(2) << "\n";
    }
  }
  return all_pass ? 0 : 3;
}

int cmd_solve(const std::string& config_path) {
  const auto root = drr::parse_config_file(config_path);
  auto rx = drr::validate_config(root);
  for (const auto& w : rx.warnings) std::cerr << "warning: " << w << "\n";
  const auto ref = drr::reference_solve(rx.problem);
  nlohmann::json j;
  j["x_star"] = std::vector<double>(ref.x_star.data(), ref.x_star.data() + ref.x_star.size());
  j["f_star"] = ref.f_star;
  j["grad_norm"] = ref.grad_norm;
  j["iterations"] = ref.iterations;
  j["exact"] = ref.exact;
  j["mu"] = rx.problem.mu;
  j["L"] = rx.problem.L;
  j["sigma_star_sq"] = drr::sigma_star_sq(rx.problem, ref.x_star);
  const auto pc = drr::constants(rx.problem, ref.f_star);
  j["A"] = pc.A;
  j["B_sq"] = pc.B_sq;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_graph_info(const std::string& topology, int n, int rows, int cols, double prob,
                   std::uint64_t gseed, double mu, double L, int m) {
  drr::TopologySpec ts;
  ts.kind = drr::topology_from_name(topology);
  ts.n = n;
  ts.rows = rows;
  ts.cols = cols;
  ts.edge_prob = prob;
  ts.seed = gseed;
  const auto g = drr::build_graph(ts);
  const auto mix = drr::metropolis_weights(g);

  nlohmann::json j;
  j["topology"] = topology;
  j["n"] = g.n;
  j["edges"] = g.edges.size();
  j["connected"] = drr::is_connected(g);
  j["rho_w"] = mix.rho;
  int dmin = g.n, dmax = 0;
  for (int i = 0; i < g.n; ++i) {
    dmin = std::min(dmin, g.degree(i));
    dmax = std::max(dmax, g.degree(i));
  }
  j["degree_min"] = dmin;
  j["degree_max"] = dmax;

  const auto sched = drr::StepsizeSchedule::constant(1.0);  // alpha irrelevant for thresholds
  const auto rep = drr::check_admissible(sched, mix.rho, L, mu, m);
  j["admissibility"] = {{"mu", mu},
                        {"L", L},
                        {"m", m},
                        {"threshold", rep.threshold},
                        {"term_network", rep.term_network},
                        {"term_strong", rep.term_strong},
                        {"term_balance", rep.term_balance},
                        {"binding", rep.binding}};
  if (!rep.note.empty()) j["admissibility"]["note"] = rep.note;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed random reshuffling experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::int64_t seed_override = -1;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_path, "output stem (overrides config)");
  run->add_option("--seed", seed_override, "master seed (overrides config; env wins)");

  std::vector<std::string> suite_list;
  std::string suite_out;
  std::uint64_t suite_seed = 42;
  auto* suite = app.add_subcommand("suite", "run named check suites");
  suite->add_option("names", suite_list, "suite names or 'all'")->required();
  suite->add_option("--out", suite_out, "directory for JSON verdicts");
  suite->add_option("--seed", suite_seed, "master seed");

  auto* solve = app.add_subcommand("solve", "reference-solve the configured problem");
  solve->add_option("config", config_path, "config file")->required();

  std::string topology = "ring";
  int n = 8, rows = 0, cols = 0, m = 1;
  double prob = 0.8, mu = 1.0, L = 1.0;
  std::uint64_t gseed = 7;
  auto* ginfo = app.add_subcommand("graph-info", "print topology and mixing info");
  ginfo->add_option("topology", topology, "complete|ring|grid|exponential|erdos_renyi")
      ->required();
  ginfo->add_option("--n", n, "number of agents")->required();
  ginfo->add_option("--rows", rows, "grid rows");
  ginfo->add_option("--cols", cols, "grid cols");
  ginfo->add_option("--prob", prob, "erdos_renyi edge probability");
  ginfo->add_option("--graph-seed", gseed, "erdos_renyi seed");
  ginfo->add_option("--mu", mu, "strong convexity constant for thresholds");
  ginfo->add_option("--l", L, "smoothness constant for thresholds");
  ginfo->add_option("--m", m, "components per agent for thresholds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path, seed_override);
    if (suite->parsed()) return cmd_suite(suite_list, suite_out, seed_with_env(suite_seed));
    if (solve->parsed()) return cmd_solve(config_path);
    if (ginfo->parsed())
      return cmd_graph_info(topology, n, rows, cols, prob, gseed, mu, L, m);
  } catch (const drr::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const drr::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
