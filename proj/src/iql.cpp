#include "cropmarl/iql.hpp"

#include <ostream>
#include <stdexcept>

#include "cropmarl/base_lp.hpp"
#include "cropmarl/csv.hpp"
#include "cropmarl/market.hpp"
#include "cropmarl/sim.hpp"

namespace cropmarl {

double QTable::max_value(StateId s) const { return at(s, argmax(s)); }

ActionId QTable::argmax(StateId s) const {
  const auto r = row(s);
  ActionId best = 0;
  for (ActionId a = 1; a < n_actions_; ++a)
    if (r[a] > r[best]) best = a;
  return best;
}

void IqlParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("iql.alpha must lie in (0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("iql.epsilon must lie in [0, 1]");
  if (episodes < 1) throw std::invalid_argument("iql.episodes must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("iql.gamma must lie in (0, 1]");
}

std::vector<QTable> init_q_tables(const Model& model, const IqlParams& params) {
  std::vector<QTable> tables(model.n_agents, QTable(model.n_states, model.n_actions));
  if (!params.warm_start) return tables;

  const auto values = solve_value_function(model, params.gamma);
  QTable warm(model.n_states, model.n_actions);
  const int next_t = 2;
  for (StateId s = 0; s < model.n_states; ++s)
    for (ActionId a = 0; a < model.n_actions; ++a) {
      const StateId next = model.transitions[model.transition_index(1, s, a)];
      warm.at(s, a) =
          model.single_agent_reward(1, s, a) + params.gamma * values.at(next_t, next);
    }
  tables.assign(model.n_agents, warm);
  return tables;
}

ActionId epsilon_greedy(std::span<const double> row, double epsilon, Rng& rng) {
  const int n = static_cast<int>(row.size());
  if (uniform01(rng) < epsilon) return uniform_index(rng, n);
  ActionId best = 0;
  for (ActionId a = 1; a < n; ++a)
    if (row[a] > row[best]) best = a;
  return best;
}

double q_update(QTable& q, StateId s, ActionId a, double r, StateId s_next,
                const IqlParams& params, bool terminal) {
  const double bootstrap = terminal ? 0.0 : q.max_value(s_next);
  double& entry = q.at(s, a);
  entry += params.alpha * (r + params.gamma * bootstrap - entry);
  return entry;
}

IqlResult train_iql_detailed(const Model& model, const IqlParams& params) {
  params.validate();
  const int n = model.n_agents;
  const int horizon = model.horizon();

  IqlResult result;
  result.q = init_q_tables(model, params);
  result.episode_rewards.reserve(params.episodes);

  Rng rng(params.seed);
  std::vector<StateId> states(n);
  std::vector<StateId> next(n);
  std::vector<ActionId> actions(n);
  std::vector<double> rewards(n);
  std::vector<int> counts;

  for (int episode = 0; episode < params.episodes; ++episode) {
    states = sample_initial_states(model, rng);
    double total = 0.0;
    for (int t = 1; t <= horizon; ++t) {
      for (int i = 0; i < n; ++i)
        actions[i] = epsilon_greedy(result.q[i].row(states[i]), params.epsilon, rng);
      // Each agent's reward already reflects the others' simultaneous harvests.
      joint_reward_into(model, t, states, actions, counts, rewards);
      const bool terminal = t == horizon;
      for (int i = 0; i < n; ++i) {
        next[i] = model.transitions[model.transition_index(t, states[i], actions[i])];
        q_update(result.q[i], states[i], actions[i], rewards[i], next[i], params, terminal);
        total += rewards[i];
      }
      std::swap(states, next);
    }
    result.episode_rewards.push_back(total);
  }

  result.policy = JointPolicy::constant(model, 0);
  for (int i = 0; i < n; ++i)
    for (StateId s = 0; s < model.n_states; ++s) {
      const ActionId a = result.q[i].argmax(s);
      for (int t = 1; t <= horizon; ++t) result.policy.set(i, t, s, a);
    }
  return result;
}

JointPolicy train_iql(const Model& model, const IqlParams& params) {
  return train_iql_detailed(model, params).policy;
}

void write_q_tables_csv(std::ostream& os, std::span<const QTable> q) {
  os << "agent,state,action,q_value\n";
  for (std::size_t i = 0; i < q.size(); ++i)
    for (StateId s = 0; s < q[i].n_states(); ++s)
      for (ActionId a = 0; a < q[i].n_actions(); ++a)
        os << i << ',' << s << ',' << a << ',' << format_double(q[i].at(s, a)) << '\n';
}

void write_iql_log_csv(std::ostream& os, std::span<const double> episode_rewards) {
  os << "episode,total_reward\n";
  for (std::size_t e = 0; e < episode_rewards.size(); ++e)
    os << (e + 1) << ',' << format_double(episode_rewards[e]) << '\n';
}

}  // namespace cropmarl
