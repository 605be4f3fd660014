#include "cropmarl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cropmarl/csv.hpp"

namespace cropmarl {

Trajectory::Trajectory(int horizon, int n_agents)
    : horizon(horizon), n_agents(n_agents),
      states(horizon, std::vector<StateId>(n_agents, 0)),
      actions(horizon, std::vector<ActionId>(n_agents, 0)),
      rewards(horizon, std::vector<double>(n_agents, 0.0)) {}

std::vector<StateId> sample_initial_states(const Model& model, Rng& rng) {
  if (static_cast<int>(model.initials.size()) != model.n_agents)
    throw std::invalid_argument("model has " + std::to_string(model.initials.size()) +
                                " initial distributions for " + std::to_string(model.n_agents) +
                                " agents");
  std::vector<StateId> states(model.n_agents);
  for (int i = 0; i < model.n_agents; ++i) states[i] = sample_discrete(rng, model.initials[i]);
  return states;
}

Trajectory simulate_from(const Model& model, const JointPolicy& policy,
                         std::span<const StateId> initial) {
  const int n = model.n_agents;
  const int horizon = model.horizon();
  if (static_cast<int>(initial.size()) != n)
    throw std::invalid_argument("simulate_from: initial joint state has wrong length");
  if (policy.n_agents() != n || policy.horizon() != horizon || policy.n_states() != model.n_states)
    throw std::invalid_argument("simulate_from: policy does not match the model dimensions");

  Trajectory traj(horizon, n);
  std::vector<int> counts;
  std::vector<StateId> current(initial.begin(), initial.end());
  for (int t = 1; t <= horizon; ++t) {
    auto& states = traj.states[t - 1];
    auto& actions = traj.actions[t - 1];
    states = current;
    for (int i = 0; i < n; ++i) actions[i] = policy.get(i, t, states[i]);
    joint_reward_into(model, t, states, actions, counts, traj.rewards[t - 1]);
    for (int i = 0; i < n; ++i)
      current[i] = model.transitions[model.transition_index(t, states[i], actions[i])];
  }
  return traj;
}

Trajectory simulate(const Model& model, const JointPolicy& policy, std::uint64_t seed) {
  Rng rng(seed);
  const auto initial = sample_initial_states(model, rng);
  return simulate_from(model, policy, initial);
}

ReturnsVector discounted_returns(const Trajectory& traj, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("discount factor must lie in (0, 1], got " + std::to_string(gamma));
  ReturnsVector g(traj.n_agents, 0.0);
  double weight = 1.0;
  for (int t = 0; t < traj.horizon; ++t) {
    for (int i = 0; i < traj.n_agents; ++i) g[i] += weight * traj.rewards[t][i];
    weight *= gamma;
  }
  return g;
}

Welfare welfare(std::span<const double> g) {
  Welfare w;
  bool log_defined = true;
  double log_sum = 0.0;
  for (double gi : g) {
    w.product *= gi + 1.0;
    if (gi > -1.0)
      log_sum += std::log1p(gi);
    else
      log_defined = false;
  }
  if (log_defined) w.log_sum = log_sum;
  return w;
}

FairnessReport fairness_metrics(std::span<const double> g) {
  FairnessReport report;
  if (g.empty()) return report;
  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  report.min = *lo;
  report.max = *hi;
  for (double gi : g) report.total += gi;
  const double mean = report.total / static_cast<double>(g.size());
  double sq = 0.0;
  for (double gi : g) sq += (gi - mean) * (gi - mean);
  const double stddev = std::sqrt(sq / static_cast<double>(g.size()));
  report.coefficient_of_variation = mean == 0.0 ? 0.0 : stddev / std::abs(mean);
  const auto w = welfare(g);
  report.welfare = w.product;
  report.log_welfare = w.log_sum;
  return report;
}

PolicyEvaluation evaluate_policy(const Model& model, const JointPolicy& policy,
                                 std::span<const std::uint64_t> seeds, double gamma) {
  PolicyEvaluation eval{ReturnsVector(model.n_agents, 0.0), ReturnsVector(model.n_agents, 0.0)};
  if (seeds.empty()) return eval;
  for (auto seed : seeds) {
    const auto traj = simulate(model, policy, seed);
    const auto g = discounted_returns(traj, gamma);
    const auto total = discounted_returns(traj, 1.0);
    for (int i = 0; i < model.n_agents; ++i) {
      eval.discounted[i] += g[i];
      eval.undiscounted[i] += total[i];
    }
  }
  const auto k = static_cast<double>(seeds.size());
  for (int i = 0; i < model.n_agents; ++i) {
    eval.discounted[i] /= k;
    eval.undiscounted[i] /= k;
  }
  return eval;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,agent,state,action,reward\n";
  for (int t = 0; t < traj.horizon; ++t)
    for (int i = 0; i < traj.n_agents; ++i)
      os << (t + 1) << ',' << i << ',' << traj.states[t][i] << ',' << traj.actions[t][i] << ','
         << format_double(traj.rewards[t][i]) << '\n';
}

bool trajectory_consistent(const Model& model, const Trajectory& traj) {
  if (static_cast<int>(traj.states.size()) != traj.horizon ||
      static_cast<int>(traj.actions.size()) != traj.horizon ||
      static_cast<int>(traj.rewards.size()) != traj.horizon)
    return false;
  for (int t = 0; t < traj.horizon; ++t)
    if (static_cast<int>(traj.states[t].size()) != traj.n_agents ||
        static_cast<int>(traj.actions[t].size()) != traj.n_agents ||
        static_cast<int>(traj.rewards[t].size()) != traj.n_agents)
      return false;
  for (int t = 0; t + 1 < traj.horizon; ++t)
    for (int i = 0; i < traj.n_agents; ++i)
      if (traj.states[t + 1][i] != apply_transition(model, t + 1, traj.states[t][i], traj.actions[t][i]))
        return false;
  return true;
}

}  // namespace cropmarl
