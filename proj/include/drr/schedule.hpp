#pragma once

#include <string>

namespace drr {

// Stepsize schedules:
//   constant    alpha_t = alpha
//   theorem1    alpha_t = theta / (m * mu * (t + K)), theta > 12
//   hyperbolic  alpha_t = 1 / (a*t + b)
struct StepsizeSchedule {
  enum class Kind { constant, theorem1, hyperbolic };
  Kind kind = Kind::constant;
  double alpha = 0.0;             // constant
  double theta = 0.0, k = 0.0;    // theorem1 (k = K)
  int m = 1;
  double mu = 0.0;
  double a = 0.0, b = 0.0;        // hyperbolic

  double at(int t) const;

  static StepsizeSchedule constant(double alpha);
  static StepsizeSchedule theorem1(double theta, double k, int m, double mu);
  static StepsizeSchedule hyperbolic(double a, double b);
};

// Constant-stepsize admissibility threshold
//   alpha <= min{ sqrt((2-rho^2)/(24 rho^2 (5-rho^2))) (1-rho^2)/L,
//                 (1-rho^2)/(2 mu),
//                 (1-rho^2) mu / (8 sqrt(30) L^2) }.
// rho = 0 (complete graph / single agent): the first term is +inf.
struct AdmissibilityReport {
  double alpha0 = 0.0;      // largest stepsize the schedule ever takes
  double threshold = 0.0;   // min of the three terms
  double term_network = 0.0, term_strong = 0.0, term_balance = 0.0;
  std::string binding;      // which term attains the min
  bool admissible = false;
  // theorem1-only diagnostics
  bool theta_ok = true;     // theta > 12
  double k_required = 0.0;  // burn-in lower bound for K
  bool k_ok = true;
  std::string note;
};

AdmissibilityReport check_admissible(const StepsizeSchedule& sched, double rho,
                                     double L, double mu, int m);

// Smallest admissible burn-in offset for the theorem1 schedule:
//   K >= max{ theta/2,
//             sqrt(24 rho^2 (5-rho^2) L^2 theta^2 / ((2-rho^2)(1-rho^2)^2 m^2 mu^2)),
//             2 theta / (m (1-rho^2)),
//             8 sqrt(30) L^2 theta / ((1-rho^2) m mu^2) }.
double theorem1_k_min(double theta, double rho, double L, double mu, int m);

}  // namespace drr
