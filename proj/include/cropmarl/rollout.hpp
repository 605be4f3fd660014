#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cropmarl/base_lp.hpp"
#include "cropmarl/model.hpp"
#include "cropmarl/sim.hpp"

namespace cropmarl {

struct RolloutParams {
  double gamma = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
};

/// v(t_next, s) from the base values; 0 past the horizon.
double base_continuation_value(const BasePolicy& base, int t_next, StateId s);

/**
 * Discounted reward of agent i = committed.size() from stage t to T when the
 * stage-t joint action is (committed..., candidate, base actions of later
 * agents) and every agent follows the base policy afterwards.
 */
double q_factor(const Model& model, const BasePolicy& base, int t,
                std::span<const StateId> joint_state, std::span<const ActionId> committed,
                ActionId candidate, const RolloutParams& params);

struct RolloutDecision {
  int t = 0;
  int agent = 0;
  StateId state = 0;
  ActionId chosen_action = 0;
  double best_q = 0.0;
  ActionId base_action = 0;
};

/// Commits each agent's argmax-Q action in ascending agent order.
std::vector<ActionId> rollout_step(const Model& model, const BasePolicy& base, int t,
                                   std::span<const StateId> joint_state,
                                   const RolloutParams& params,
                                   std::vector<RolloutDecision>* decisions = nullptr);

struct RolloutResult {
  /// Executed decisions at visited (agent, t, state); base actions elsewhere.
  JointPolicy policy;
  Trajectory trajectory;
  std::vector<RolloutDecision> decisions;
};

RolloutResult run_rollout(const Model& model, const BasePolicy& base,
                          const RolloutParams& params);

/// CSV with columns t, agent, state, chosen_action, best_q, base_action.
void write_decisions_csv(std::ostream& os, std::span<const RolloutDecision> decisions);

}  // namespace cropmarl
