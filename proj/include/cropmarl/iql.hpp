#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cropmarl/model.hpp"
#include "cropmarl/rng.hpp"

namespace cropmarl {

/// One agent's Q-table over (state, action), shared across timesteps.
class QTable {
 public:
  QTable() = default;
  QTable(int n_states, int n_actions, double fill = 0.0)
      : n_states_(n_states), n_actions_(n_actions),
        q_(static_cast<std::size_t>(n_states) * n_actions, fill) {}

  double& at(StateId s, ActionId a) { return q_[static_cast<std::size_t>(s) * n_actions_ + a]; }
  double at(StateId s, ActionId a) const {
    return q_[static_cast<std::size_t>(s) * n_actions_ + a];
  }
  std::span<const double> row(StateId s) const {
    return {q_.data() + static_cast<std::size_t>(s) * n_actions_,
            static_cast<std::size_t>(n_actions_)};
  }
  double max_value(StateId s) const;
  ActionId argmax(StateId s) const;

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }

  bool operator==(const QTable&) const = default;

 private:
  int n_states_ = 0;
  int n_actions_ = 0;
  std::vector<double> q_;
};

struct IqlParams {
  double alpha = 0.1;
  double epsilon = 0.1;
  int episodes = 1000;
  double gamma = 0.9;
  bool warm_start = true;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the first out-of-range field.
  void validate() const;
};

/// Zero tables, or a one-step backup of the base values at t = 1 when
/// warm-starting: Q(s, a) = r1(1, s, a) + gamma * v(2, P_1(s, a)).
std::vector<QTable> init_q_tables(const Model& model, const IqlParams& params);

/// Uniform action with probability epsilon, otherwise the lowest argmax.
ActionId epsilon_greedy(std::span<const double> row, double epsilon, Rng& rng);

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s_next, a') - Q(s,a)); returns the
/// new entry. A terminal step bootstraps from nothing.
double q_update(QTable& q, StateId s, ActionId a, double r, StateId s_next,
                const IqlParams& params, bool terminal = false);

struct IqlResult {
  std::vector<QTable> q;
  JointPolicy policy;
  /// Undiscounted reward summed over agents, per episode.
  std::vector<double> episode_rewards;
};

IqlResult train_iql_detailed(const Model& model, const IqlParams& params);

/// Runs the episodes and extracts pi_{i,t}(s) = argmax_a Q_i(s, a) for all t.
JointPolicy train_iql(const Model& model, const IqlParams& params);

/// CSV with columns agent, state, action, q_value.
void write_q_tables_csv(std::ostream& os, std::span<const QTable> q);
/// CSV with columns episode, total_reward.
void write_iql_log_csv(std::ostream& os, std::span<const double> episode_rewards);

}  // namespace cropmarl
