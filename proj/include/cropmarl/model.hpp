#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cropmarl/market.hpp"

namespace cropmarl {

/// Finite horizon of `horizon` timesteps, each covering `days_per_step` days.
struct TimeGrid {
  int horizon = 1;
  int days_per_step = 1;

  bool operator==(const TimeGrid&) const = default;
};

/**
 * The shared multi-agent MDP.
 *
 * Every agent owns an identical copy of the single-agent dynamics
 * (states, actions, deterministic non-stationary transitions); agents are
 * coupled only through the market reward. Timesteps are 1-based in the
 * public API: t = 1..horizon.
 *
 * Fields are public so that tests and loaders can assemble arbitrary (even
 * broken) models; validate_model() reports what is wrong with one.
 */
struct Model {
  int n_agents = 1;
  TimeGrid time;
  int n_states = 0;
  int n_actions = 0;
  std::vector<std::string> state_labels;
  std::vector<std::string> action_labels;
  /// Dense [t-1][s][a] successor table, flattened.
  std::vector<StateId> transitions;
  /// Per-agent probability vectors over states.
  std::vector<std::vector<double>> initials;
  MarketRewardFunction reward;

  int horizon() const { return time.horizon; }

  /// Unchecked flat index into `transitions`.
  std::size_t transition_index(int t, StateId s, ActionId a) const {
    return (static_cast<std::size_t>(t - 1) * n_states + s) * n_actions + a;
  }

  /// Allocates a transition table where every (t, s, a) self-loops.
  void reset_transitions();
  void set_transition(int t, StateId s, ActionId a, StateId next);

  /// Single-agent view of the market: the reward of a lone agent (d = 1).
  double single_agent_reward(int t, StateId s, ActionId a) const;

  bool operator==(const Model&) const = default;
};

/// Successor of `s` under `a` at timestep t. Throws std::out_of_range naming
/// the offending index.
StateId apply_transition(const Model& model, int t, StateId s, ActionId a);

/// Empty list means the model is well formed.
std::vector<std::string> validate_model(const Model& model);

/// Per-agent, per-timestep state -> action tables.
class JointPolicy {
 public:
  JointPolicy() = default;
  JointPolicy(int n_agents, int horizon, int n_states, int n_actions,
              ActionId fill = 0);

  static JointPolicy constant(const Model& model, ActionId action);
  static JointPolicy random(const Model& model, std::uint64_t seed);

  ActionId at(int agent, int t, StateId s) const;
  void set(int agent, int t, StateId s, ActionId a);

  int n_agents() const { return n_agents_; }
  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }

  /// Unchecked access for inner loops.
  ActionId get(int agent, int t, StateId s) const {
    return table_[index(agent, t, s)];
  }

  bool operator==(const JointPolicy&) const = default;

 private:
  std::size_t index(int agent, int t, StateId s) const {
    return (static_cast<std::size_t>(agent) * horizon_ + (t - 1)) * n_states_ + s;
  }
  void check(int agent, int t, StateId s) const;

  int n_agents_ = 0;
  int horizon_ = 0;
  int n_states_ = 0;
  int n_actions_ = 0;
  std::vector<ActionId> table_;
};

/// Policy lookup with range checks.
ActionId policy_lookup(const JointPolicy& policy, int agent, int t, StateId s);

}  // namespace cropmarl
