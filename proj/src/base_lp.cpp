#include "cropmarl/base_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cropmarl/csv.hpp"

namespace cropmarl {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("discount factor must lie in (0, 1], got " + std::to_string(gamma));
}

/// r1(t,s,a) + gamma * v(t+1, P_t(s,a)).
double backup(const Model& model, const ValueFunction& values, double gamma, int t, StateId s,
              ActionId a) {
  const StateId next = model.transitions[model.transition_index(t, s, a)];
  return model.single_agent_reward(t, s, a) + gamma * values.at(t + 1, next);
}

}  // namespace

ValueFunction::ValueFunction(int horizon, int n_states)
    : horizon_(horizon), n_states_(n_states),
      v_(static_cast<std::size_t>(horizon + 1) * n_states, 0.0) {}

// The time-expanded graph over (t, s) is acyclic, so the LP
//   min sum V  s.t.  V(t,s) >= r1(t,s,a) + gamma V(t+1, P_t(s,a))
// is solved exactly by one backward sweep.
ValueFunction solve_value_function(const Model& model, double gamma) {
  check_gamma(gamma);
  ValueFunction values(model.horizon(), model.n_states);
  for (int t = model.horizon(); t >= 1; --t)
    for (StateId s = 0; s < model.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (ActionId a = 0; a < model.n_actions; ++a)
        best = std::max(best, backup(model, values, gamma, t, s, a));
      values.at(t, s) = best;
    }
  return values;
}

BasePolicy greedy_policy(const Model& model, const ValueFunction& values, double gamma) {
  check_gamma(gamma);
  BasePolicy base;
  base.values = values;
  base.n_states = model.n_states;
  base.actions.assign(static_cast<std::size_t>(model.horizon()) * model.n_states, 0);
  for (int t = 1; t <= model.horizon(); ++t)
    for (StateId s = 0; s < model.n_states; ++s) {
      ActionId best_action = 0;
      double best = backup(model, values, gamma, t, s, 0);
      for (ActionId a = 1; a < model.n_actions; ++a) {
        const double q = backup(model, values, gamma, t, s, a);
        if (q > best) {
          best = q;
          best_action = a;
        }
      }
      base.actions[static_cast<std::size_t>(t - 1) * model.n_states + s] = best_action;
    }
  return base;
}

BasePolicy solve_base_policy(const Model& model, double gamma) {
  return greedy_policy(model, solve_value_function(model, gamma), gamma);
}

JointPolicy base_joint_policy(const Model& model, const BasePolicy& base) {
  JointPolicy policy = JointPolicy::constant(model, 0);
  for (int i = 0; i < model.n_agents; ++i)
    for (int t = 1; t <= model.horizon(); ++t)
      for (StateId s = 0; s < model.n_states; ++s) policy.set(i, t, s, base.act(t, s));
  return policy;
}

double bellman_residual(const Model& model, const ValueFunction& values, double gamma) {
  double worst = 0.0;
  for (int t = 1; t <= model.horizon(); ++t)
    for (StateId s = 0; s < model.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (ActionId a = 0; a < model.n_actions; ++a)
        best = std::max(best, backup(model, values, gamma, t, s, a));
      worst = std::max(worst, std::abs(values.at(t, s) - best));
    }
  for (StateId s = 0; s < model.n_states; ++s)
    worst = std::max(worst, std::abs(values.at(model.horizon() + 1, s)));
  return worst;
}

void write_value_function_csv(std::ostream& os, const BasePolicy& base) {
  os << "t,state,value,greedy_action\n";
  for (int t = 1; t <= base.values.horizon(); ++t)
    for (StateId s = 0; s < base.n_states; ++s)
      os << t << ',' << s << ',' << format_double(base.values.at(t, s)) << ',' << base.act(t, s)
         << '\n';
}

}  // namespace cropmarl
