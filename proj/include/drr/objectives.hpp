#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "drr/data.hpp"

namespace drr {

enum class ProblemKind { quadratic, logistic_l2, logistic_sigmoidal };

const char* problem_kind_name(ProblemKind k);
ProblemKind problem_kind_from_name(const std::string& name);

// Component f_{i,l} storage. Quadratic components share a diagonal Hessian
// spectrum so the strong convexity / smoothness constants are exact;
// heterogeneity enters through the minimizer centers. Logistic components
// hold their mini-batch rows.
struct QuadComponent {
  Eigen::VectorXd b;  // f(x) = 0.5 x'diag(q)x - b'x
};

struct BatchComponent {
  Eigen::MatrixXd features;  // batch rows
  Eigen::VectorXd labels;    // +-1
};

// Finite sum over n agents with m components each:
//   f(x) = (1/n) sum_i f_i(x),  f_i(x) = (1/m) sum_l f_{i,l}(x).
// Immutable after construction; evaluation is pure and reentrant. The gradient
// eval counter is observational only (budget-parity tests).
struct FiniteSumProblem {
  ProblemKind kind = ProblemKind::quadratic;
  int n = 0, m = 0, p = 0;
  double l2_coeff = 0.0;         // rho, logistic_l2
  double sigmoid_coeff = 0.0;    // eta, logistic_sigmoidal
  Eigen::VectorXd q_diag;        // quadratic Hessian diagonal (shared)
  std::vector<QuadComponent> quads;      // n*m, index i*m + l
  std::vector<BatchComponent> batches;   // n*m, index i*m + l
  Eigen::MatrixXd lower_bounds;  // n x m, inf of each f_{i,l}
  double mu = 0.0, L = 0.0;      // Assumption-level constants (mu = 0 if nonconvex)

  std::shared_ptr<std::atomic<std::uint64_t>> grad_evals =
      std::make_shared<std::atomic<std::uint64_t>>(0);

  bool strongly_convex() const { return kind != ProblemKind::logistic_sigmoidal; }
  int idx(int i, int l) const;  // bounds-checked

  double component_value(int i, int l, const Eigen::VectorXd& x) const;
  void component_gradient(int i, int l, const Eigen::VectorXd& x,
                          Eigen::VectorXd& out) const;
  Eigen::VectorXd component_gradient(int i, int l, const Eigen::VectorXd& x) const;

  double agent_value(int i, const Eigen::VectorXd& x) const;
  void agent_gradient(int i, const Eigen::VectorXd& x, Eigen::VectorXd& out) const;

  double full_value(const Eigen::VectorXd& x) const;
  void full_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& out) const;
  Eigen::VectorXd full_gradient(const Eigen::VectorXd& x) const;
};

// Bound on |d^2/dx^2 x^2/(1+x^2)|, attained at 0. The sigmoidal regularizer
// (eta/2) sum_q x_q^2/(1+x_q^2) therefore has Hessian norm <= (eta/2) * this.
inline constexpr double kSigmoidCurvatureBound = 2.0;

struct LmuEstimate { double mu; double L; };

// Per-component smoothness/convexity constants aggregated over all components
// (max L, min mu). Quadratic: exact extreme eigenvalues. logistic_l2:
// L = rho + max_j ||u_j||^2/4 per component, mu = rho. logistic_sigmoidal:
// L = max_j ||u_j||^2/4 + (eta/2)*curvature bound, mu = 0.
LmuEstimate estimate_L_mu(const FiniteSumProblem& prob);

struct ProblemConstants { double mu, L, A, B_sq; };

// Gradient-dispersion constants: A = 2L and
// B^2 = 2L (f_bar - mean of component lower bounds), with f_bar = inf f
// supplied by the reference solver.
ProblemConstants constants(const FiniteSumProblem& prob, double f_bar);

// Heterogeneous quadratic ensemble. Every component has Hessian
// diag(linspace(L, mu)); agent i draws component minimizers around an
// agent-specific center of magnitude `heterogeneity`, spread `noise`.
FiniteSumProblem make_quadratic_problem(int n, int m, int p, double mu, double L,
                                        double heterogeneity, double noise,
                                        std::uint64_t seed);

// Mini-batched logistic objectives over a partitioned dataset.
// kind = logistic_l2 (coeff = l2 rho) or logistic_sigmoidal (coeff = eta).
FiniteSumProblem make_logistic_problem(ProblemKind kind, const LabeledDataset& data,
                                       const Partition& part, double coeff);

}  // namespace drr
