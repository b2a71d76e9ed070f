#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "drr/graph.hpp"
#include "drr/mixing.hpp"
#include "drr/objectives.hpp"
#include "drr/theory.hpp"

using namespace drr;

namespace {

MixingMatrix topo(TopologyKind kind, int n) {
  return metropolis_weights(build_graph({kind, n}));
}

}  // namespace

TEST_CASE("rate fit recovers an exact power law") {
  std::vector<double> x, v;
  for (int t = 10; t <= 200; t += 10) {
    x.push_back(t);
    v.push_back(3.0 / (static_cast<double>(t) * t));
  }
  const auto fit = fit_rate(x, v);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(std::abs(fit.half_width) <= 1e-9);
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(fit.points == 20);
}

TEST_CASE("rate fit of a flat series is zero slope") {
  const std::vector<double> x{1, 2, 4, 8, 16};
  const std::vector<double> v(5, 0.37);
  CHECK(std::abs(fit_rate(x, v).slope) <= 1e-12);
}

TEST_CASE("rate fit is scale invariant") {
  std::vector<double> x, v, v_scaled;
  for (int t = 5; t <= 100; t += 5) {
    x.push_back(t);
    const double val = 2.0 / std::pow(t, 1.5) * (1.0 + 0.05 * std::sin(t));
    v.push_back(val);
    v_scaled.push_back(1234.5 * val);
  }
  const auto a = fit_rate(x, v);
  const auto b = fit_rate(x, v_scaled);
  CHECK(std::abs(a.slope - b.slope) < 1e-12);
}

TEST_CASE("rate fit input validation") {
  CHECK_THROWS_AS(fit_rate({1, 2}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({1, 2, 3}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({1, 2, 3}, {1.0, -2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({1, 2, 3}, {1.0, 0.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({2, 2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("contraction verdicts across topologies") {
  for (auto kind : {TopologyKind::complete, TopologyKind::ring, TopologyKind::exponential}) {
    const auto mix = topo(kind, 8);
    const auto res = check_contraction(mix, 300, 3, 99);
    CHECK(res.pass);
    CHECK(res.check == "contraction");
    const double worst_ratio = res.measured["worst_ratio"].get<double>();
    CHECK(worst_ratio <= mix.rho + 1e-9);
    CHECK(res.measured["worst_excess"].get<double>() <= 1e-9);
  }
  // Complete graph: one round reaches exact consensus.
  const auto complete = check_contraction(topo(TopologyKind::complete, 8), 100, 2, 7);
  CHECK(complete.measured["worst_ratio"].get<double>() <= 1e-12);
}

TEST_CASE("check result serializes to json") {
  const auto res = check_contraction(topo(TopologyKind::ring, 4), 10, 2, 1);
  const auto j = res.to_json();
  CHECK(j.contains("check"));
  CHECK(j.contains("params"));
  CHECK(j.contains("measured"));
  CHECK(j.contains("pass"));
  CHECK(j["pass"].get<bool>());
}

TEST_CASE("variance sandwich on an enumerable instance") {
  // Strongly heterogeneous components around homogeneous agent centers and a
  // wide spectrum: both sandwich sides hold deterministically (enumeration).
  const auto prob = make_quadratic_problem(2, 2, 2, 1.0, 10.0, 0.0, 1.0, 202);
  const auto ref = reference_solve(prob);
  for (double alpha : {1e-2, 1e-3}) {
    const auto res = check_variance_sandwich(prob, ref, alpha, 0, 31);
    CHECK(res.pass);
    CHECK(res.measured["exact"].get<bool>());
    const double est = res.measured["sigma_shuffle_sq"].get<double>();
    CHECK(est >= res.measured["lower"].get<double>());
    CHECK(est <= res.measured["upper"].get<double>());
  }
}

TEST_CASE("sandwich estimate scales as the stepsize squared") {
  const auto prob = make_quadratic_problem(2, 2, 2, 1.0, 10.0, 0.0, 1.0, 202);
  const auto ref = reference_solve(prob);
  const auto hi = check_variance_sandwich(prob, ref, 2e-3, 0, 31);
  const auto lo = check_variance_sandwich(prob, ref, 1e-3, 0, 31);
  const double ratio = hi.measured["sigma_shuffle_sq"].get<double>() /
                       lo.measured["sigma_shuffle_sq"].get<double>();
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.5);
}

TEST_CASE("floor scaling self-test: identical stepsizes must fail") {
  const auto prob = make_quadratic_problem(4, 4, 2, 1.0, 1.0, 0.0, 2.0, 203);
  const auto mix = topo(TopologyKind::ring, 4);
  const auto res =
      check_floor_scaling(prob, mix, Method::drr, 0.01, 600, 3, 11, 0.01);
  CHECK_FALSE(res.pass);
  const double ratio = res.measured["ratio"].get<double>();
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("consensus scaling input validation and exact-consensus verdict") {
  const auto prob = make_quadratic_problem(4, 4, 2, 1.0, 1.0, 0.0, 2.0, 204);
  CHECK_THROWS_AS(check_consensus_scaling(prob, topo(TopologyKind::ring, 4), Method::drr,
                                          {0.01, 0.005}, 100, 2, 1),
                  std::invalid_argument);
  // Complete graph: plateaus at machine epsilon, reported as exact consensus.
  const auto res = check_consensus_scaling(prob, topo(TopologyKind::complete, 4),
                                           Method::drr, {0.01, 0.005, 0.0025}, 200, 2, 1);
  CHECK(res.pass);
  CHECK(res.note.find("exact consensus") != std::string::npos);
}

TEST_CASE("lyapunov recursion check runs and reports sane numbers") {
  const auto prob = make_quadratic_problem(4, 4, 2, 1.0, 1.0, 0.0, 2.0, 205);
  const auto mix = topo(TopologyKind::ring, 4);
  const auto res = check_H_recursion(prob, mix, 0.01, 60, 8, 500, 3);
  const double frac = res.measured["fraction_ok"].get<double>();
  CHECK(frac >= 0.0);
  CHECK(frac <= 1.0);
  const double contraction = res.measured["contraction"].get<double>();
  CHECK(contraction > 0.0);
  CHECK(contraction < 1.0);
  CHECK(res.measured["additive"].get<double>() > 0.0);

  const auto ncvx_data = synth_classification(32, 2, 1.0, 1);
  const auto part = heterogeneous_partition(ncvx_data, 4, 4);
  const auto ncvx = make_logistic_problem(ProblemKind::logistic_sigmoidal, ncvx_data, part, 0.2);
  CHECK_THROWS_AS(check_H_recursion(ncvx, mix, 0.01, 10, 2, 100, 3),
                  std::invalid_argument);
}
