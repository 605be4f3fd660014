#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cropmarl/model.hpp"
#include "cropmarl/sim.hpp"

namespace cropmarl {

enum class AgentSelection { kCyclic, kRandom };
enum class PolicyInit { kConstant, kRandom };

struct AbaParams {
  double gamma = 0.9;
  /// 0 selects the default of 20 * n_agents.
  int max_iterations = 0;
  double delta = 0.1;
  AgentSelection agent_selection = AgentSelection::kRandom;
  PolicyInit init = PolicyInit::kConstant;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Raised when some g_j equals -1, where dU/dg_j is undefined.
class WelfareSingularity : public std::runtime_error {
 public:
  explicit WelfareSingularity(int agent);
  int agent() const { return agent_; }

 private:
  int agent_;
};

/// The point around which welfare is linearized: the trajectory of the
/// current joint policy and the returns and welfare derived from it.
struct LinearizationContext {
  Trajectory trajectory;
  ReturnsVector g;
  double welfare = 1.0;
  double gamma = 1.0;

  static LinearizationContext from_trajectory(Trajectory traj, double gamma);
};

/// dU/dr_{t,j} = U / (g_j + 1) * gamma^{t-1}.
double welfare_gradient(const LinearizationContext& ctx, int t, int j);

/**
 * C_{i,t}(s, a): first-order change in welfare when agent i's stage-t state
 * and action are replaced by (s, a), all peers unchanged. Computed as
 * (substituted rewards - current rewards) dotted with the welfare gradient.
 */
double linear_coefficient(const LinearizationContext& ctx, const Model& model, int i, int t,
                          StateId s, ActionId a);

/// DP_t(s) for t = 1..T.
class DpTable {
 public:
  DpTable() = default;
  DpTable(int horizon, int n_states)
      : horizon_(horizon), n_states_(n_states),
        dp_(static_cast<std::size_t>(horizon) * n_states, 0.0) {}

  double at(int t, StateId s) const { return dp_[index(t, s)]; }
  double& at(int t, StateId s) { return dp_[index(t, s)]; }
  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }

 private:
  std::size_t index(int t, StateId s) const {
    return static_cast<std::size_t>(t - 1) * n_states_ + s;
  }
  int horizon_ = 0;
  int n_states_ = 0;
  std::vector<double> dp_;
};

struct SingleAgentSolution {
  /// [t-1][s], flattened.
  std::vector<ActionId> actions;
  DpTable dp;

  ActionId act(int t, StateId s) const {
    return actions[static_cast<std::size_t>(t - 1) * dp.n_states() + s];
  }
};

/// Backward DP over agent i's time-expanded states maximizing summed C.
SingleAgentSolution optimize_single_agent(const Model& model, const LinearizationContext& ctx,
                                          int i);

struct AbaLogEntry {
  int iteration = 0;
  int selected_agent = 0;
  double welfare_before = 0.0;
  double welfare_after = 0.0;
};

struct AbaResult {
  JointPolicy policy;
  std::vector<AbaLogEntry> log;
};

AbaResult train_aba_detailed(const Model& model, const AbaParams& params);
JointPolicy train_aba(const Model& model, const AbaParams& params);

/// CSV with columns iteration, selected_agent, welfare_before, welfare_after.
void write_aba_log_csv(std::ostream& os, std::span<const AbaLogEntry> log);

}  // namespace cropmarl
