#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drr/config.hpp"
#include "drr/graph.hpp"
#include "drr/metrics.hpp"
#include "drr/theory.hpp"

namespace drr {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int reps = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::string output;
  std::vector<Method> methods;
  int epochs = 0;
  bool per_agent_init = false;
  double init_scale = 1.0;
  std::vector<std::string> metrics;
  nlohmann::json echo;  // canonicalized config for the JSON sidecar
};

// Fully validated, ready-to-run experiment. Construction errors are
// ConfigError naming the offending key path; theoretical-admissibility
// violations are warnings, not errors.
struct ResolvedExperiment {
  ExperimentConfig cfg;
  FiniteSumProblem problem;
  Graph graph;
  MixingMatrix mix;
  StepsizeSchedule schedule;
  std::vector<std::string> warnings;
};

ResolvedExperiment validate_config(const ConfigNode& root);

struct MethodSeries {
  Method method;
  // values[metric][epoch][rep]
  std::vector<std::vector<std::vector<double>>> values;
  double wall_sec = 0.0;
  std::string csv_path, json_path;  // set when files were written
};

struct ExperimentResult {
  std::vector<MethodSeries> series;
  ReferenceSolution ref;
  double sigma_star = 0.0;  // sigma_*^2 at the reference point
  double rho = 0.0;
};

// Runs every configured method over cfg.reps repetitions (identical
// initialization, per-rep seeds pre-derived from the master seed, fanned out
// over cfg.threads workers), then writes one CSV + one JSON sidecar per
// method under cfg.output (skipped when output is empty). CSV bytes are
// identical across runs and worker-thread counts.
ExperimentResult run_experiment(const ResolvedExperiment& rx);

// Long-format CSV: header epoch,metric,mean,stderr,rep0,...,rep{R-1}.
std::string format_csv(const std::vector<std::string>& metrics,
                       const std::vector<std::vector<std::vector<double>>>& values);

// Named canonical check suites.
const std::vector<std::string>& suite_names();
std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed);

}  // namespace drr
