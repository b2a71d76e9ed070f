#include "drr/optimizers.hpp"

#include <cmath>
#include <numeric>

#include "drr/rng.hpp"

namespace drr {

namespace {

constexpr double kDivergenceCap = 1e12;

void check_finite(const AgentStateBlock& state, Method method) {
  if (!state.x.allFinite() || state.x.cwiseAbs().maxCoeff() > kDivergenceCap)
    throw DivergenceError(
        state.epoch, std::string("divergence: |iterate| exceeded 1e12 running ") +
                         method_name(method) + " at epoch " + std::to_string(state.epoch));
}

void end_epoch(AgentStateBlock& state, Method method) {
  check_finite(state, method);
  state.epoch += 1;
  state.inner = 0;
}

void require_epoch_start(const AgentStateBlock& state, const char* op) {
  if (state.inner != 0)
    throw std::logic_error(std::string(op) + ": state must be at an epoch boundary");
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::drr: return "drr";
    case Method::crr: return "crr";
    case Method::dsgd: return "dsgd";
    case Method::sgd: return "sgd";
    case Method::egrr: return "egrr";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "drr") return Method::drr;
  if (name == "crr") return Method::crr;
  if (name == "dsgd") return Method::dsgd;
  if (name == "sgd") return Method::sgd;
  if (name == "egrr") return Method::egrr;
  throw std::invalid_argument("unknown method: " + name);
}

std::vector<int> PermutationStream::permutation(int agent, int epoch) const {
  rng::Stream s(rng::derive(master, rng::kTagPermutation,
                            static_cast<std::uint64_t>(agent),
                            static_cast<std::uint64_t>(epoch)));
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  s.shuffle(perm);
  return perm;
}

std::vector<int> PermutationStream::samples(int agent, int epoch) const {
  rng::Stream s(rng::derive(master, rng::kTagSampling,
                            static_cast<std::uint64_t>(agent),
                            static_cast<std::uint64_t>(epoch)));
  std::vector<int> idx(m);
  for (int l = 0; l < m; ++l)
    idx[l] = static_cast<int>(s.next_below(static_cast<std::uint64_t>(m)));
  return idx;
}

void drr_inner_step(AgentStateBlock& state, const MixingMatrix& mix,
                    const FiniteSumProblem& prob, const PermutationStream& perms,
                    double alpha, const InnerObserver* obs) {
  const int n = state.n(), p = state.p();
  Eigen::MatrixXd grads(n, p);
  Eigen::VectorXd g(p);
  for (int i = 0; i < n; ++i) {
    const auto perm = perms.permutation(i, state.epoch);
    prob.component_gradient(i, perm[state.inner], state.x.row(i).transpose(), g);
    grads.row(i) = g;
  }
  Eigen::MatrixXd pre = state.x;
  state.x = mix.w * (state.x - alpha * grads);
  if (obs) (*obs)(InnerStepInfo{state.epoch, state.inner, alpha, pre, grads, state.x});
  state.inner += 1;
}

void drr_epoch(AgentStateBlock& state, const MixingMatrix& mix,
               const FiniteSumProblem& prob, const PermutationStream& perms,
               const StepsizeSchedule& sched, const InnerObserver* obs) {
  require_epoch_start(state, "drr_epoch");
  const double alpha = sched.at(state.epoch);
  for (int l = 0; l < prob.m; ++l) drr_inner_step(state, mix, prob, perms, alpha, obs);
  end_epoch(state, Method::drr);
}

void crr_epoch(AgentStateBlock& state, const FiniteSumProblem& prob,
               const PermutationStream& perms, const StepsizeSchedule& sched,
               const InnerObserver* obs) {
  require_epoch_start(state, "crr_epoch");
  const double alpha = sched.at(state.epoch);
  const int n = state.n(), p = state.p();
  const auto perm = perms.permutation(0, state.epoch);
  Eigen::VectorXd g(p), sum(p);
  Eigen::MatrixXd grads(n, p);
  for (int l = 0; l < prob.m; ++l) {
    const Eigen::VectorXd x = state.x.row(0).transpose();
    sum.setZero();
    for (int i = 0; i < n; ++i) {
      prob.component_gradient(i, perm[l], x, g);
      grads.row(i) = g;
      sum += g;
    }
    sum /= static_cast<double>(n);
    Eigen::MatrixXd pre = state.x;
    const Eigen::RowVectorXd next = state.x.row(0) - alpha * sum.transpose();
    state.x.rowwise() = next;
    if (obs) (*obs)(InnerStepInfo{state.epoch, l, alpha, pre, grads, state.x});
    state.inner += 1;
  }
  end_epoch(state, Method::crr);
}

void dsgd_epoch(AgentStateBlock& state, const MixingMatrix& mix,
                const FiniteSumProblem& prob, const PermutationStream& perms,
                const StepsizeSchedule& sched, const InnerObserver* obs) {
  require_epoch_start(state, "dsgd_epoch");
  const double alpha = sched.at(state.epoch);
  const int n = state.n(), p = state.p();
  std::vector<std::vector<int>> draws(n);
  for (int i = 0; i < n; ++i) draws[i] = perms.samples(i, state.epoch);
  Eigen::MatrixXd grads(n, p);
  Eigen::VectorXd g(p);
  for (int l = 0; l < prob.m; ++l) {
    for (int i = 0; i < n; ++i) {
      prob.component_gradient(i, draws[i][l], state.x.row(i).transpose(), g);
      grads.row(i) = g;
    }
    Eigen::MatrixXd pre = state.x;
    state.x = mix.w * (state.x - alpha * grads);
    if (obs) (*obs)(InnerStepInfo{state.epoch, l, alpha, pre, grads, state.x});
    state.inner += 1;
  }
  end_epoch(state, Method::dsgd);
}

void sgd_epoch(AgentStateBlock& state, const FiniteSumProblem& prob,
               const PermutationStream& perms, const StepsizeSchedule& sched,
               const InnerObserver* obs) {
  require_epoch_start(state, "sgd_epoch");
  const double alpha = sched.at(state.epoch);
  const int n = state.n(), p = state.p();
  std::vector<std::vector<int>> draws(n);
  for (int i = 0; i < n; ++i) draws[i] = perms.samples(i, state.epoch);
  Eigen::VectorXd g(p), sum(p);
  Eigen::MatrixXd grads(n, p);
  for (int l = 0; l < prob.m; ++l) {
    const Eigen::VectorXd x = state.x.row(0).transpose();
    sum.setZero();
    for (int i = 0; i < n; ++i) {
      prob.component_gradient(i, draws[i][l], x, g);
      grads.row(i) = g;
      sum += g;
    }
    sum /= static_cast<double>(n);
    Eigen::MatrixXd pre = state.x;
    const Eigen::RowVectorXd next = state.x.row(0) - alpha * sum.transpose();
    state.x.rowwise() = next;
    if (obs) (*obs)(InnerStepInfo{state.epoch, l, alpha, pre, grads, state.x});
    state.inner += 1;
  }
  end_epoch(state, Method::sgd);
}

void egrr_epoch(AgentStateBlock& state, const MixingMatrix& mix,
                const FiniteSumProblem& prob, const PermutationStream& perms,
                const StepsizeSchedule& sched, const InnerObserver* obs) {
  require_epoch_start(state, "egrr_epoch");
  const double alpha = sched.at(state.epoch);
  const int n = state.n(), p = state.p();
  Eigen::MatrixXd grads(n, p);
  Eigen::VectorXd g(p);
  for (int l = 0; l < prob.m; ++l) {
    for (int i = 0; i < n; ++i) {
      const auto perm = perms.permutation(i, state.epoch);
      prob.component_gradient(i, perm[l], state.x.row(i).transpose(), g);
      grads.row(i) = g;
    }
    Eigen::MatrixXd pre = state.x;
    state.x -= alpha * grads;  // no mixing inside the epoch
    if (obs) (*obs)(InnerStepInfo{state.epoch, l, alpha, pre, grads, state.x});
    state.inner += 1;
  }
  state.x = mix.w * state.x;  // single gossip round per epoch
  end_epoch(state, Method::egrr);
}

void run_epoch(Method method, AgentStateBlock& state, const MixingMatrix& mix,
               const FiniteSumProblem& prob, const PermutationStream& perms,
               const StepsizeSchedule& sched, const InnerObserver* obs) {
  switch (method) {
    case Method::drr: drr_epoch(state, mix, prob, perms, sched, obs); return;
    case Method::crr: crr_epoch(state, prob, perms, sched, obs); return;
    case Method::dsgd: dsgd_epoch(state, mix, prob, perms, sched, obs); return;
    case Method::sgd: sgd_epoch(state, prob, perms, sched, obs); return;
    case Method::egrr: egrr_epoch(state, mix, prob, perms, sched, obs); return;
  }
}

std::vector<Eigen::VectorXd> limit_points(const FiniteSumProblem& prob,
                                          const std::vector<std::vector<int>>& perms,
                                          const Eigen::VectorXd& x_star, double alpha) {
  if (static_cast<int>(perms.size()) != prob.n)
    throw std::invalid_argument("limit_points: need one permutation per agent");
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(prob.m + 1);
  pts.push_back(x_star);
  Eigen::VectorXd g(prob.p);
  for (int l = 0; l < prob.m; ++l) {
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(prob.p);
    for (int i = 0; i < prob.n; ++i) {
      prob.component_gradient(i, perms[i].at(l), x_star, g);
      avg += g;
    }
    pts.push_back(pts.back() - (alpha / static_cast<double>(prob.n)) * avg);
  }
  const double resid = (pts.back() - x_star).norm();
  if (resid > 1e-10 * std::max(1.0, x_star.norm()))
    throw std::runtime_error(
        "limit_points: telescoping failed (" + std::to_string(resid) +
        "); x_star is not an accurate minimizer");
  return pts;
}

}  // namespace drr
