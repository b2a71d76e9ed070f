#include "drr/objectives.hpp"

#include <cmath>
#include <stdexcept>

#include "drr/rng.hpp"

namespace drr {

namespace {

// log(1 + e^z) without overflow
inline double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

const char* problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::logistic_l2: return "logistic_l2";
    case ProblemKind::logistic_sigmoidal: return "logistic_sigmoidal";
  }
  return "?";
}

ProblemKind problem_kind_from_name(const std::string& name) {
  if (name == "quadratic") return ProblemKind::quadratic;
  if (name == "logistic_l2") return ProblemKind::logistic_l2;
  if (name == "logistic_sigmoidal") return ProblemKind::logistic_sigmoidal;
  throw std::invalid_argument("unknown problem kind: " + name);
}

int FiniteSumProblem::idx(int i, int l) const {
  if (i < 0 || i >= n || l < 0 || l >= m)
    throw std::out_of_range("component index (" + std::to_string(i) + "," +
                            std::to_string(l) + ") out of range");
  return i * m + l;
}

double FiniteSumProblem::component_value(int i, int l, const Eigen::VectorXd& x) const {
  const int k = idx(i, l);
  switch (kind) {
    case ProblemKind::quadratic: {
      const auto& c = quads[k];
      return 0.5 * x.dot(q_diag.cwiseProduct(x)) - c.b.dot(x);
    }
    case ProblemKind::logistic_l2: {
      const auto& c = batches[k];
      double v = 0.0;
      for (int j = 0; j < c.features.rows(); ++j)
        v += softplus(-c.labels(j) * c.features.row(j).dot(x));
      return v / static_cast<double>(c.features.rows()) + 0.5 * l2_coeff * x.squaredNorm();
    }
    case ProblemKind::logistic_sigmoidal: {
      const auto& c = batches[k];
      double v = 0.0;
      for (int j = 0; j < c.features.rows(); ++j)
        v += softplus(-c.labels(j) * c.features.row(j).dot(x));
      v /= static_cast<double>(c.features.rows());
      double r = 0.0;
      for (int q = 0; q < p; ++q) {
        const double s = x(q) * x(q);
        r += s / (1.0 + s);
      }
      return v + 0.5 * sigmoid_coeff * r;
    }
  }
  return 0.0;
}

void FiniteSumProblem::component_gradient(int i, int l, const Eigen::VectorXd& x,
                                          Eigen::VectorXd& out) const {
  const int k = idx(i, l);
  grad_evals->fetch_add(1, std::memory_order_relaxed);
  switch (kind) {
    case ProblemKind::quadratic: {
      const auto& c = quads[k];
      out = q_diag.cwiseProduct(x) - c.b;
      return;
    }
    case ProblemKind::logistic_l2:
    case ProblemKind::logistic_sigmoidal: {
      const auto& c = batches[k];
      out.setZero(p);
      for (int j = 0; j < c.features.rows(); ++j) {
        const double y = c.labels(j);
        const double margin = y * c.features.row(j).dot(x);
        out -= sigmoid(-margin) * y * c.features.row(j).transpose();
      }
      out /= static_cast<double>(c.features.rows());
      if (kind == ProblemKind::logistic_l2) {
        out += l2_coeff * x;
      } else {
        for (int q = 0; q < p; ++q) {
          const double d = 1.0 + x(q) * x(q);
          out(q) += sigmoid_coeff * x(q) / (d * d);
        }
      }
      return;
    }
  }
}

Eigen::VectorXd FiniteSumProblem::component_gradient(int i, int l,
                                                     const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(p);
  component_gradient(i, l, x, g);
  return g;
}

double FiniteSumProblem::agent_value(int i, const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (int l = 0; l < m; ++l) v += component_value(i, l, x);
  return v / static_cast<double>(m);
}

void FiniteSumProblem::agent_gradient(int i, const Eigen::VectorXd& x,
                                      Eigen::VectorXd& out) const {
  out.setZero(p);
  Eigen::VectorXd g(p);
  for (int l = 0; l < m; ++l) {
    component_gradient(i, l, x, g);
    out += g;
  }
  out /= static_cast<double>(m);
}

double FiniteSumProblem::full_value(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < m; ++l) v += component_value(i, l, x);
  return v / static_cast<double>(n * m);
}

void FiniteSumProblem::full_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
  out.setZero(p);
  Eigen::VectorXd g(p);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < m; ++l) {
      component_gradient(i, l, x, g);
      out += g;
    }
  out /= static_cast<double>(n * m);
}

Eigen::VectorXd FiniteSumProblem::full_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(p);
  full_gradient(x, g);
  return g;
}

LmuEstimate estimate_L_mu(const FiniteSumProblem& prob) {
  switch (prob.kind) {
    case ProblemKind::quadratic:
      // shared diagonal spectrum: extremes are exact
      return {prob.q_diag.minCoeff(), prob.q_diag.maxCoeff()};
    case ProblemKind::logistic_l2:
    case ProblemKind::logistic_sigmoidal: {
      double worst = 0.0;
      for (const auto& c : prob.batches)
        for (int j = 0; j < c.features.rows(); ++j)
          worst = std::max(worst, c.features.row(j).squaredNorm() / 4.0);
      if (prob.kind == ProblemKind::logistic_l2)
        return {prob.l2_coeff, prob.l2_coeff + worst};
      return {0.0, worst + 0.5 * prob.sigmoid_coeff * kSigmoidCurvatureBound};
    }
  }
  return {0.0, 0.0};
}

ProblemConstants constants(const FiniteSumProblem& prob, double f_bar) {
  ProblemConstants c;
  c.mu = prob.mu;
  c.L = prob.L;
  c.A = 2.0 * prob.L;
  c.B_sq = 2.0 * prob.L * (f_bar - prob.lower_bounds.mean());
  return c;
}

FiniteSumProblem make_quadratic_problem(int n, int m, int p, double mu, double L,
                                        double heterogeneity, double noise,
                                        std::uint64_t seed) {
  if (n < 1 || m < 1 || p < 1) throw std::invalid_argument("quadratic: bad sizes");
  if (!(mu > 0.0) || L < mu) throw std::invalid_argument("quadratic: need 0 < mu <= L");
  if (p == 1 && mu != L)
    throw std::invalid_argument("quadratic: p = 1 forces mu == L");

  FiniteSumProblem prob;
  prob.kind = ProblemKind::quadratic;
  prob.n = n;
  prob.m = m;
  prob.p = p;
  prob.q_diag.resize(p);
  for (int q = 0; q < p; ++q)
    prob.q_diag(q) =
        (p == 1) ? L : L - (L - mu) * static_cast<double>(q) / static_cast<double>(p - 1);

  prob.quads.resize(static_cast<std::size_t>(n) * m);
  prob.lower_bounds.resize(n, m);
  for (int i = 0; i < n; ++i) {
    rng::Stream ci(rng::derive(seed, rng::kTagProblem, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd center(p);
    for (int q = 0; q < p; ++q) center(q) = heterogeneity * ci.next_gaussian();
    for (int l = 0; l < m; ++l) {
      rng::Stream cl(rng::derive(seed, rng::kTagProblem, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(l) + 1));
      Eigen::VectorXd c = center;
      for (int q = 0; q < p; ++q) c(q) += noise * cl.next_gaussian();
      auto& comp = prob.quads[static_cast<std::size_t>(i) * m + l];
      comp.b = prob.q_diag.cwiseProduct(c);
      // min of 0.5 x'Qx - b'x is -0.5 b'Q^{-1}b
      prob.lower_bounds(i, l) = -0.5 * comp.b.dot(comp.b.cwiseQuotient(prob.q_diag));
    }
  }
  const auto lm = estimate_L_mu(prob);
  prob.mu = lm.mu;
  prob.L = lm.L;
  return prob;
}

FiniteSumProblem make_logistic_problem(ProblemKind kind, const LabeledDataset& data,
                                       const Partition& part, double coeff) {
  if (kind == ProblemKind::quadratic)
    throw std::invalid_argument("make_logistic_problem: kind must be a logistic variant");
  FiniteSumProblem prob;
  prob.kind = kind;
  prob.n = part.n;
  prob.m = part.m;
  prob.p = data.dim();
  if (kind == ProblemKind::logistic_l2)
    prob.l2_coeff = coeff;
  else
    prob.sigmoid_coeff = coeff;

  prob.batches.resize(static_cast<std::size_t>(part.n) * part.m);
  prob.lower_bounds = Eigen::MatrixXd::Zero(part.n, part.m);  // both terms nonnegative
  for (int i = 0; i < part.n; ++i) {
    for (int l = 0; l < part.m; ++l) {
      const auto& ids = part.batches.at(i).at(l);
      if (ids.empty()) throw std::invalid_argument("make_logistic_problem: empty mini-batch");
      auto& c = prob.batches[static_cast<std::size_t>(i) * part.m + l];
      c.features.resize(static_cast<int>(ids.size()), data.dim());
      c.labels.resize(static_cast<int>(ids.size()));
      for (std::size_t j = 0; j < ids.size(); ++j) {
        c.features.row(static_cast<int>(j)) = data.features.row(ids[j]);
        c.labels(static_cast<int>(j)) = data.labels(ids[j]);
      }
    }
  }
  const auto lm = estimate_L_mu(prob);
  prob.mu = lm.mu;
  prob.L = lm.L;
  return prob;
}

}  // namespace drr
