#include "drr/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drr {

double StepsizeSchedule::at(int t) const {
  switch (kind) {
    case Kind::constant:
      return alpha;
    case Kind::theorem1:
      return theta / (static_cast<double>(m) * mu * (static_cast<double>(t) + k));
    case Kind::hyperbolic:
      return 1.0 / (a * static_cast<double>(t) + b);
  }
  return 0.0;
}

StepsizeSchedule StepsizeSchedule::constant(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("schedule: alpha must be positive");
  StepsizeSchedule s;
  s.kind = Kind::constant;
  s.alpha = alpha;
  return s;
}

StepsizeSchedule StepsizeSchedule::theorem1(double theta, double k, int m, double mu) {
  if (!(theta > 0.0) || !(k > 0.0) || m < 1 || !(mu > 0.0))
    throw std::invalid_argument("schedule: theorem1 needs theta, K, mu positive and m >= 1");
  StepsizeSchedule s;
  s.kind = Kind::theorem1;
  s.theta = theta;
  s.k = k;
  s.m = m;
  s.mu = mu;
  return s;
}

StepsizeSchedule StepsizeSchedule::hyperbolic(double a, double b) {
  if (!(a >= 0.0) || !(b > 0.0)) throw std::invalid_argument("schedule: hyperbolic needs a >= 0, b > 0");
  StepsizeSchedule s;
  s.kind = Kind::hyperbolic;
  s.a = a;
  s.b = b;
  return s;
}

AdmissibilityReport check_admissible(const StepsizeSchedule& sched, double rho,
                                     double L, double mu, int m) {
  if (!(L > 0.0) || !(mu > 0.0) || m < 1 || rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("check_admissible: need L, mu > 0, m >= 1, rho in [0,1)");
  AdmissibilityReport r;
  const double r2 = rho * rho;
  const double gap = 1.0 - r2;
  r.term_network = (rho == 0.0)
                       ? std::numeric_limits<double>::infinity()
                       : std::sqrt((2.0 - r2) / (24.0 * r2 * (5.0 - r2))) * gap / L;
  r.term_strong = gap / (2.0 * mu);
  r.term_balance = gap * mu / (8.0 * std::sqrt(30.0) * L * L);
  r.threshold = std::min({r.term_network, r.term_strong, r.term_balance});
  if (r.threshold == r.term_network)
    r.binding = "network";
  else if (r.threshold == r.term_strong)
    r.binding = "strong_convexity";
  else
    r.binding = "gradient_balance";
  if (rho == 0.0) r.note = "rho = 0: network term vacuous (+inf)";

  r.alpha0 = sched.at(0);  // all three kinds are nonincreasing in t
  r.admissible = r.alpha0 <= r.threshold;

  if (sched.kind == StepsizeSchedule::Kind::theorem1) {
    r.theta_ok = sched.theta > 12.0;
    r.k_required = theorem1_k_min(sched.theta, rho, L, mu, m);
    r.k_ok = sched.k >= r.k_required;
  }
  return r;
}

double theorem1_k_min(double theta, double rho, double L, double mu, int m) {
  const double r2 = rho * rho;
  const double gap = 1.0 - r2;
  const double md = static_cast<double>(m);
  const double t1 = theta / 2.0;
  const double t2 = std::sqrt(24.0 * r2 * (5.0 - r2) * L * L * theta * theta /
                              ((2.0 - r2) * gap * gap * md * md * mu * mu));
  const double t3 = 2.0 * theta / (md * gap);
  const double t4 = 8.0 * std::sqrt(30.0) * L * L * theta / (gap * md * mu * mu);
  return std::max({t1, t2, t3, t4});
}

}  // namespace drr
