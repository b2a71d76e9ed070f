#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drr/mixing.hpp"
#include "drr/objectives.hpp"
#include "drr/schedule.hpp"

namespace drr {

enum class Method { drr, crr, dsgd, sgd, egrr };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// Per-(agent, epoch) randomness derived statelessly from the master seed, so
// draws are identical regardless of evaluation order or thread scheduling.
// Centralized methods (crr, sgd) read agent 0's stream, which makes the n = 1
// distributed/centralized reduction exact.
struct PermutationStream {
  std::uint64_t master = 0;
  int m = 0;

  // fresh uniformly random permutation of [0, m)
  std::vector<int> permutation(int agent, int epoch) const;
  // m with-replacement uniform component indices (one inner epoch of sampling)
  std::vector<int> samples(int agent, int epoch) const;
};

// Stacked iterates, one row per agent.
struct AgentStateBlock {
  Eigen::MatrixXd x;  // n x p
  int epoch = 0;
  int inner = 0;

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }
  Eigen::RowVectorXd mean() const { return x.colwise().mean(); }
  double consensus_sq() const {
    return (x.rowwise() - x.colwise().mean()).squaredNorm();
  }
};

struct DivergenceError : std::runtime_error {
  int epoch;
  explicit DivergenceError(int t, const std::string& what)
      : std::runtime_error(what), epoch(t) {}
};

// Invoked after each completed inner step (post-mixing for distributed
// methods). References are valid only during the call.
struct InnerStepInfo {
  int epoch;
  int inner;  // index l of the step just taken
  double alpha;
  const Eigen::MatrixXd& pre_state;   // x^l
  const Eigen::MatrixXd& gradients;   // row i = gradient used by agent i
  const Eigen::MatrixXd& post_state;  // x^{l+1}
};
using InnerObserver = std::function<void(const InnerStepInfo&)>;

// One D-RR inner step l: x <- W (x - alpha * G) with
// G row i = grad f_{i, perm_i(l)}(x_i). Advances state.inner.
void drr_inner_step(AgentStateBlock& state, const MixingMatrix& mix,
                    const FiniteSumProblem& prob, const PermutationStream& perms,
                    double alpha, const InnerObserver* obs = nullptr);

// One epoch (m inner steps, each agent walking its own fresh permutation).
// Pre: state.inner == 0. Post: epoch advanced, inner reset to 0.
void drr_epoch(AgentStateBlock& state, const MixingMatrix& mix,
               const FiniteSumProblem& prob, const PermutationStream& perms,
               const StepsizeSchedule& sched, const InnerObserver* obs = nullptr);

// Centralized random reshuffling: one shared permutation per epoch (agent 0's
// stream), x <- x - (alpha/n) sum_i grad f_{i,pi(l)}(x). All rows kept equal.
void crr_epoch(AgentStateBlock& state, const FiniteSumProblem& prob,
               const PermutationStream& perms, const StepsizeSchedule& sched,
               const InnerObserver* obs = nullptr);

// Decentralized SGD under the same per-epoch budget: m inner steps of
// x <- W (x - alpha * G), G row i = grad f_{i, c}(x_i) with c drawn uniformly
// with replacement.
void dsgd_epoch(AgentStateBlock& state, const MixingMatrix& mix,
                const FiniteSumProblem& prob, const PermutationStream& perms,
                const StepsizeSchedule& sched, const InnerObserver* obs = nullptr);

// Centralized SGD twin of dsgd (shared iterate, with-replacement draws).
void sgd_epoch(AgentStateBlock& state, const FiniteSumProblem& prob,
               const PermutationStream& perms, const StepsizeSchedule& sched,
               const InnerObserver* obs = nullptr);

// Epoch-wise gossip ablation: m purely local reshuffled steps, then a single
// mixing round at the epoch boundary.
void egrr_epoch(AgentStateBlock& state, const MixingMatrix& mix,
                const FiniteSumProblem& prob, const PermutationStream& perms,
                const StepsizeSchedule& sched, const InnerObserver* obs = nullptr);

// Dispatch one epoch of `method`.
void run_epoch(Method method, AgentStateBlock& state, const MixingMatrix& mix,
               const FiniteSumProblem& prob, const PermutationStream& perms,
               const StepsizeSchedule& sched, const InnerObserver* obs = nullptr);

// Epoch-wise limit points of the exact-average recursion started at x*:
//   point[0] = x*,  point[l+1] = point[l] - alpha * (1/n) sum_i grad f_{i, perm_i[l]}(x*).
// Returns m+1 points; point[m] telescopes back to x* (checked to 1e-10,
// throws if the supplied x* is not an accurate minimizer).
std::vector<Eigen::VectorXd> limit_points(const FiniteSumProblem& prob,
                                          const std::vector<std::vector<int>>& perms,
                                          const Eigen::VectorXd& x_star, double alpha);

}  // namespace drr
