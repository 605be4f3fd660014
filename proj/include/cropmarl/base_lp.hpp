#pragma once

#include <iosfwd>
#include <vector>

#include "cropmarl/model.hpp"

namespace cropmarl {

/// Reward-to-go over time-expanded states (t, s), t = 1..T+1; row T+1 is 0.
class ValueFunction {
 public:
  ValueFunction() = default;
  ValueFunction(int horizon, int n_states);

  double at(int t, StateId s) const { return v_[index(t, s)]; }
  double& at(int t, StateId s) { return v_[index(t, s)]; }

  int horizon() const { return horizon_; }
  int n_states() const { return n_states_; }

  bool operator==(const ValueFunction&) const = default;

 private:
  std::size_t index(int t, StateId s) const {
    return static_cast<std::size_t>(t - 1) * n_states_ + s;
  }

  int horizon_ = 0;
  int n_states_ = 0;
  std::vector<double> v_;
};

/// Base policy: values plus the greedy time-indexed action table.
struct BasePolicy {
  ValueFunction values;
  /// [t-1][s], flattened.
  std::vector<ActionId> actions;
  int n_states = 0;

  ActionId act(int t, StateId s) const {
    return actions[static_cast<std::size_t>(t - 1) * n_states + s];
  }
};

/// Optimal single-agent value function under the lone-seller reward view
/// (d = 1), by exact backward induction over (t, s).
ValueFunction solve_value_function(const Model& model, double gamma);

/// Greedy actions w.r.t. `values`; ties go to the lowest ActionId.
BasePolicy greedy_policy(const Model& model, const ValueFunction& values, double gamma);

/// solve_value_function followed by greedy_policy.
BasePolicy solve_base_policy(const Model& model, double gamma);

/// Every agent follows the base policy.
JointPolicy base_joint_policy(const Model& model, const BasePolicy& base);

/// Largest |v(t,s) - max_a [r1 + gamma * v(t+1, P_t(s,a))]| over all (t, s).
double bellman_residual(const Model& model, const ValueFunction& values, double gamma);

/// CSV with columns t, state, value, greedy_action.
void write_value_function_csv(std::ostream& os, const BasePolicy& base);

}  // namespace cropmarl
