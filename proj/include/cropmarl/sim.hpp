#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cropmarl/model.hpp"
#include "cropmarl/rng.hpp"

namespace cropmarl {

/// One simulated horizon; rows are timesteps (row 0 is t = 1), columns agents.
struct Trajectory {
  int horizon = 0;
  int n_agents = 0;
  std::vector<std::vector<StateId>> states;
  std::vector<std::vector<ActionId>> actions;
  std::vector<std::vector<double>> rewards;

  Trajectory() = default;
  Trajectory(int horizon, int n_agents);

  bool operator==(const Trajectory&) const = default;
};

using ReturnsVector = std::vector<double>;

struct Welfare {
  double product = 1.0;
  /// Present only when every g_i > -1.
  std::optional<double> log_sum;
};

struct FairnessReport {
  double total = 0.0;
  double min = 0.0;
  double max = 0.0;
  double coefficient_of_variation = 0.0;
  double welfare = 1.0;
  std::optional<double> log_welfare;
};

/// Initial joint state drawn from each agent's distribution.
std::vector<StateId> sample_initial_states(const Model& model, Rng& rng);

Trajectory simulate(const Model& model, const JointPolicy& policy, std::uint64_t seed);

/// Unrolls from a given initial joint state.
Trajectory simulate_from(const Model& model, const JointPolicy& policy,
                         std::span<const StateId> initial);

/// g_i = sum_t gamma^{t-1} r_{t,i}. Throws std::invalid_argument unless
/// gamma is in (0, 1].
ReturnsVector discounted_returns(const Trajectory& traj, double gamma);

/// U = prod (g_i + 1), with the log form when defined.
Welfare welfare(std::span<const double> g);

FairnessReport fairness_metrics(std::span<const double> g);

/// Seed-averaged returns of a fixed policy.
struct PolicyEvaluation {
  ReturnsVector discounted;
  ReturnsVector undiscounted;
};

PolicyEvaluation evaluate_policy(const Model& model, const JointPolicy& policy,
                                 std::span<const std::uint64_t> seeds, double gamma);

/// CSV dump with columns t, agent, state, action, reward.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Checks states[t+1][i] == P_t(states[t][i], actions[t][i]).
bool trajectory_consistent(const Model& model, const Trajectory& traj);

}  // namespace cropmarl
