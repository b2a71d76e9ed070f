#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "drr/schedule.hpp"

using namespace drr;

namespace {

// Independent scalar arithmetic for the admissibility threshold; kept
// deliberately separate from the library implementation.
struct OracleTerms {
  double network, strong, balance;
};

OracleTerms oracle_threshold(double rho, double L, double mu) {
  OracleTerms t{};
  const double r2 = rho * rho;
  const double gap = 1.0 - r2;
  t.network = (rho == 0.0)
                  ? std::numeric_limits<double>::infinity()
                  : std::sqrt((2.0 - r2) / (24.0 * r2 * (5.0 - r2))) * gap / L;
  t.strong = gap / (2.0 * mu);
  t.balance = gap * mu / (8.0 * std::sqrt(30.0) * L * L);
  return t;
}

double oracle_k_min(double theta, double rho, double L, double mu, int m) {
  const double r2 = rho * rho;
  const double gap = 1.0 - r2;
  const double md = static_cast<double>(m);
  double k = theta / 2.0;
  k = std::max(k, std::sqrt(24.0 * r2 * (5.0 - r2) * L * L * theta * theta /
                            ((2.0 - r2) * gap * gap * md * md * mu * mu)));
  k = std::max(k, 2.0 * theta / (md * gap));
  k = std::max(k, 8.0 * std::sqrt(30.0) * L * L * theta / (gap * md * mu * mu));
  return k;
}

}  // namespace

TEST_CASE("constant schedule is flat") {
  const auto s = StepsizeSchedule::constant(0.05);
  for (int t : {0, 1, 10, 1000}) CHECK(s.at(t) == 0.05);
  CHECK_THROWS_AS(StepsizeSchedule::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(StepsizeSchedule::constant(-1.0), std::invalid_argument);
}

TEST_CASE("decaying schedule hand value and monotonicity") {
  const auto s = StepsizeSchedule::theorem1(16.0, 249.0, 8, 1.0);
  CHECK(s.at(0) == doctest::Approx(16.0 / (8.0 * 249.0)).epsilon(1e-15));
  CHECK(s.at(1) == doctest::Approx(16.0 / (8.0 * 250.0)).epsilon(1e-15));
  for (int t = 0; t < 100; ++t) {
    CHECK(s.at(t) > 0.0);
    CHECK(s.at(t + 1) < s.at(t));
  }
  CHECK_THROWS_AS(StepsizeSchedule::theorem1(16.0, 10.0, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(StepsizeSchedule::theorem1(0.0, 10.0, 8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(StepsizeSchedule::theorem1(16.0, 10.0, 8, 0.0), std::invalid_argument);
}

TEST_CASE("hyperbolic schedule") {
  const auto s = StepsizeSchedule::hyperbolic(2.0, 5.0);
  CHECK(s.at(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(s.at(10) == doctest::Approx(1.0 / 25.0).epsilon(1e-15));
  CHECK_THROWS_AS(StepsizeSchedule::hyperbolic(-1.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(StepsizeSchedule::hyperbolic(2.0, 0.0), std::invalid_argument);
}

TEST_CASE("admissibility threshold matches independent arithmetic") {
  // rho = 1/3, L = mu = 1: two implementations of the same closed form must
  // agree to 1e-12 relative.
  const double rho = 1.0 / 3.0;
  const auto want = oracle_threshold(rho, 1.0, 1.0);
  const auto rep = check_admissible(StepsizeSchedule::constant(0.01), rho, 1.0, 1.0, 8);
  CHECK(rep.term_network == doctest::Approx(want.network).epsilon(1e-12));
  CHECK(rep.term_strong == doctest::Approx(want.strong).epsilon(1e-12));
  CHECK(rep.term_balance == doctest::Approx(want.balance).epsilon(1e-12));
  const double threshold = std::min({want.network, want.strong, want.balance});
  CHECK(rep.threshold == doctest::Approx(threshold).epsilon(1e-12));
  // For these constants the third (gradient-balance) term is the smallest:
  // term2 = 4/9 ~ 0.444, term3 = (8/9)/(8 sqrt 30) ~ 0.0203, term1 ~ 0.53.
  CHECK(rep.binding == "gradient_balance");
  CHECK(rep.alpha0 == 0.01);
  CHECK(rep.admissible);  // 0.01 is below the ~0.0203 threshold
}

TEST_CASE("admissibility verdict flips at the threshold") {
  const double rho = 1.0 / 3.0;
  const auto want = oracle_threshold(rho, 1.0, 1.0);
  const double thr = std::min({want.network, want.strong, want.balance});
  const auto ok = check_admissible(StepsizeSchedule::constant(thr * 0.99), rho, 1.0, 1.0, 8);
  CHECK(ok.admissible);
  const auto bad = check_admissible(StepsizeSchedule::constant(thr * 1.01), rho, 1.0, 1.0, 8);
  CHECK_FALSE(bad.admissible);
}

TEST_CASE("complete graph removes the network term") {
  const auto rep = check_admissible(StepsizeSchedule::constant(0.01), 0.0, 2.0, 1.0, 4);
  CHECK(std::isinf(rep.term_network));
  CHECK(rep.threshold == doctest::Approx(std::min(0.5, 1.0 / (8.0 * std::sqrt(30.0) * 4.0)))
                             .epsilon(1e-12));
  CHECK_FALSE(rep.note.empty());
}

TEST_CASE("burn-in lower bound matches independent arithmetic") {
  // Frozen network value for the eight-node ring under Metropolis weights.
  const double rho8 = 0.8047378541243653;
  const double want = oracle_k_min(16.0, rho8, 1.0, 1.0, 8);
  CHECK(theorem1_k_min(16.0, rho8, 1.0, 1.0, 8) == doctest::Approx(want).epsilon(1e-12));
  // All four terms exercised across parameter corners.
  CHECK(theorem1_k_min(16.0, 0.0, 1.0, 1.0, 1) ==
        doctest::Approx(oracle_k_min(16.0, 0.0, 1.0, 1.0, 1)).epsilon(1e-12));
  CHECK(theorem1_k_min(13.0, 0.9, 10.0, 0.1, 4) ==
        doctest::Approx(oracle_k_min(13.0, 0.9, 10.0, 0.1, 4)).epsilon(1e-12));
}

TEST_CASE("decaying-schedule diagnostics: theta gate and burn-in check") {
  const double rho = 0.5;
  const double kmin = theorem1_k_min(16.0, rho, 1.0, 1.0, 8);

  const auto good =
      check_admissible(StepsizeSchedule::theorem1(16.0, kmin * 1.01, 8, 1.0), rho, 1.0, 1.0, 8);
  CHECK(good.theta_ok);
  CHECK(good.k_ok);
  CHECK(good.k_required == doctest::Approx(kmin).epsilon(1e-12));

  const auto small_k =
      check_admissible(StepsizeSchedule::theorem1(16.0, kmin * 0.5, 8, 1.0), rho, 1.0, 1.0, 8);
  CHECK_FALSE(small_k.k_ok);

  const auto small_theta =
      check_admissible(StepsizeSchedule::theorem1(11.0, 4000.0, 8, 1.0), rho, 1.0, 1.0, 8);
  CHECK_FALSE(small_theta.theta_ok);
}

TEST_CASE("admissibility rejects bad inputs") {
  const auto s = StepsizeSchedule::constant(0.01);
  CHECK_THROWS_AS(check_admissible(s, -0.1, 1.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(check_admissible(s, 1.0, 1.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(check_admissible(s, 0.5, 0.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(check_admissible(s, 0.5, 1.0, 0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(check_admissible(s, 0.5, 1.0, 1.0, 0), std::invalid_argument);
}
