#include "cropmarl/rollout.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cropmarl/csv.hpp"
#include "cropmarl/market.hpp"
#include "cropmarl/rng.hpp"

namespace cropmarl {

void RolloutParams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("rollout.gamma must lie in (0, 1], got " + std::to_string(gamma));
}

double base_continuation_value(const BasePolicy& base, int t_next, StateId s) {
  if (t_next > base.values.horizon()) return 0.0;
  return base.values.at(t_next, s);
}

namespace {

struct Scratch {
  std::vector<StateId> states;
  std::vector<ActionId> actions;
  std::vector<double> rewards;
  std::vector<int> counts;
};

double q_factor_into(const Model& model, const BasePolicy& base, int t,
                     std::span<const StateId> joint_state, std::span<const ActionId> committed,
                     ActionId candidate, const RolloutParams& params, Scratch& scratch) {
  const int n = model.n_agents;
  const int i = static_cast<int>(committed.size());
  if (n == 1) {
    const StateId next = model.transitions[model.transition_index(t, joint_state[0], candidate)];
    return model.single_agent_reward(t, joint_state[0], candidate) +
           params.gamma * base_continuation_value(base, t + 1, next);
  }

  auto& states = scratch.states;
  auto& actions = scratch.actions;
  states.assign(joint_state.begin(), joint_state.end());
  actions.resize(n);
  scratch.rewards.resize(n);
  for (int j = 0; j < i; ++j) actions[j] = committed[j];
  actions[i] = candidate;
  for (int j = i + 1; j < n; ++j) actions[j] = base.act(t, states[j]);

  double total = 0.0;
  double weight = 1.0;
  for (int k = t;; ++k) {
    joint_reward_into(model, k, states, actions, scratch.counts, scratch.rewards);
    total += weight * scratch.rewards[i];
    if (k == model.horizon()) break;
    for (int j = 0; j < n; ++j) {
      states[j] = model.transitions[model.transition_index(k, states[j], actions[j])];
      actions[j] = base.act(k + 1, states[j]);
    }
    weight *= params.gamma;
  }
  return total;
}

}  // namespace

double q_factor(const Model& model, const BasePolicy& base, int t,
                std::span<const StateId> joint_state, std::span<const ActionId> committed,
                ActionId candidate, const RolloutParams& params) {
  const int n = model.n_agents;
  if (static_cast<int>(joint_state.size()) != n || static_cast<int>(committed.size()) >= n)
    throw std::invalid_argument("q_factor: joint state or committed prefix has wrong length");
  Scratch scratch;
  return q_factor_into(model, base, t, joint_state, committed, candidate, params, scratch);
}

std::vector<ActionId> rollout_step(const Model& model, const BasePolicy& base, int t,
                                   std::span<const StateId> joint_state,
                                   const RolloutParams& params,
                                   std::vector<RolloutDecision>* decisions) {
  const int n = model.n_agents;
  if (static_cast<int>(joint_state.size()) != n)
    throw std::invalid_argument("rollout_step: joint state has wrong length");
  std::vector<ActionId> chosen;
  chosen.reserve(n);
  Scratch scratch;
  for (int i = 0; i < n; ++i) {
    double best_q = -std::numeric_limits<double>::infinity();
    ActionId best_action = 0;
    for (ActionId a = 0; a < model.n_actions; ++a) {
      const double q = q_factor_into(model, base, t, joint_state, chosen, a, params, scratch);
      if (q > best_q) {
        best_q = q;
        best_action = a;
      }
    }
    chosen.push_back(best_action);
    if (decisions)
      decisions->push_back({t, i, joint_state[i], best_action, best_q, base.act(t, joint_state[i])});
  }
  return chosen;
}

RolloutResult run_rollout(const Model& model, const BasePolicy& base, const RolloutParams& params) {
  params.validate();
  const int n = model.n_agents;
  RolloutResult result;
  result.policy = base_joint_policy(model, base);
  result.trajectory = Trajectory(model.horizon(), n);

  Rng rng(params.seed);
  auto states = sample_initial_states(model, rng);
  std::vector<int> counts;
  for (int t = 1; t <= model.horizon(); ++t) {
    const auto actions = rollout_step(model, base, t, states, params, &result.decisions);
    auto& row = result.trajectory;
    row.states[t - 1] = states;
    row.actions[t - 1] = actions;
    joint_reward_into(model, t, states, actions, counts, row.rewards[t - 1]);
    for (int i = 0; i < n; ++i) {
      result.policy.set(i, t, states[i], actions[i]);
      states[i] = model.transitions[model.transition_index(t, states[i], actions[i])];
    }
  }
  return result;
}

void write_decisions_csv(std::ostream& os, std::span<const RolloutDecision> decisions) {
  os << "t,agent,state,chosen_action,best_q,base_action\n";
  for (const auto& d : decisions)
    os << d.t << ',' << d.agent << ',' << d.state << ',' << d.chosen_action << ','
       << format_double(d.best_q) << ',' << d.base_action << '\n';
}

}  // namespace cropmarl
