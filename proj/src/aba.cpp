#include "cropmarl/aba.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "cropmarl/csv.hpp"
#include "cropmarl/market.hpp"
#include "cropmarl/rng.hpp"

namespace cropmarl {

namespace {

constexpr int kSingularityRetries = 8;

/// Stage-t linearization data for the agent being optimized. Peers' states
/// and actions are fixed by the trajectory, so the substituted reward vector
/// differs from the current one only for harvesters of the crop agent i
/// leaves and the crop it joins; C is assembled from those two groups.
struct StageTerms {
  std::vector<int> counts;          // d_{t,c} including agent i
  std::vector<double> peer_weight;  // sum of dU/dr_{t,j} over peers j != i harvesting c
  CropId own_crop = kNoCrop;
  double own_reward = 0.0;
  double own_weight = 0.0;
};

StageTerms stage_terms(const Model& model, const LinearizationContext& ctx, int i, int t) {
  const auto& market = model.reward;
  const auto& states = ctx.trajectory.states[t - 1];
  const auto& actions = ctx.trajectory.actions[t - 1];
  StageTerms terms;
  terms.counts.assign(market.price.n_crops, 0);
  terms.peer_weight.assign(market.price.n_crops, 0.0);
  for (int j = 0; j < ctx.trajectory.n_agents; ++j) {
    const CropId c = market.harvested_crop(states[j], actions[j]);
    const double weight = welfare_gradient(ctx, t, j);
    if (j == i) {
      terms.own_crop = c;
      terms.own_weight = weight;
      terms.own_reward = ctx.trajectory.rewards[t - 1][j];
    }
    if (c == kNoCrop) continue;
    ++terms.counts[c];
    if (j != i) terms.peer_weight[c] += weight;
  }
  return terms;
}

double fast_coefficient(const Model& model, const StageTerms& terms, int t, StateId s,
                        ActionId a) {
  const auto& curve = model.reward.price;
  const CropId joined = model.reward.harvested_crop(s, a);
  if (joined == terms.own_crop) return 0.0;
  double change = 0.0;
  if (terms.own_crop != kNoCrop) {
    const int d = terms.counts[terms.own_crop];
    if (d > 1)
      change += (price_unchecked(curve, t, terms.own_crop, d - 1) -
                 price_unchecked(curve, t, terms.own_crop, d)) *
                terms.peer_weight[terms.own_crop];
  }
  double new_reward = 0.0;
  if (joined != kNoCrop) {
    const int d = terms.counts[joined];
    new_reward = price_unchecked(curve, t, joined, d + 1);
    if (d > 0)
      change += (new_reward - price_unchecked(curve, t, joined, d)) * terms.peer_weight[joined];
  }
  change += (new_reward - terms.own_reward) * terms.own_weight;
  return change;
}

}  // namespace

void AbaParams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("aba.gamma must lie in (0, 1]");
  if (max_iterations < 0) throw std::invalid_argument("aba.max_iterations must be >= 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("aba.delta must be >= 0");
}

WelfareSingularity::WelfareSingularity(int agent)
    : std::runtime_error("welfare gradient undefined: return of agent " + std::to_string(agent) +
                         " equals -1"),
      agent_(agent) {}

LinearizationContext LinearizationContext::from_trajectory(Trajectory traj, double gamma) {
  LinearizationContext ctx;
  ctx.g = discounted_returns(traj, gamma);
  ctx.welfare = cropmarl::welfare(ctx.g).product;
  ctx.gamma = gamma;
  ctx.trajectory = std::move(traj);
  return ctx;
}

double welfare_gradient(const LinearizationContext& ctx, int t, int j) {
  const double denom = ctx.g.at(j) + 1.0;
  if (denom == 0.0) throw WelfareSingularity(j);
  return ctx.welfare / denom * std::pow(ctx.gamma, t - 1);
}

double linear_coefficient(const LinearizationContext& ctx, const Model& model, int i, int t,
                          StateId s, ActionId a) {
  const auto& states = ctx.trajectory.states.at(t - 1);
  const auto& actions = ctx.trajectory.actions.at(t - 1);
  const auto current = joint_reward(model, t, states, actions);
  auto swapped_states = states;
  auto swapped_actions = actions;
  swapped_states.at(i) = s;
  swapped_actions.at(i) = a;
  const auto substituted = joint_reward(model, t, swapped_states, swapped_actions);
  double c = 0.0;
  for (int j = 0; j < model.n_agents; ++j)
    c += (substituted[j] - current[j]) * welfare_gradient(ctx, t, j);
  return c;
}

SingleAgentSolution optimize_single_agent(const Model& model, const LinearizationContext& ctx,
                                          int i) {
  const int horizon = model.horizon();
  SingleAgentSolution sol;
  sol.dp = DpTable(horizon, model.n_states);
  sol.actions.assign(static_cast<std::size_t>(horizon) * model.n_states, 0);

  for (int t = horizon; t >= 1; --t) {
    const auto terms = stage_terms(model, ctx, i, t);
    for (StateId s = 0; s < model.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      ActionId best_action = 0;
      for (ActionId a = 0; a < model.n_actions; ++a) {
        double value = fast_coefficient(model, terms, t, s, a);
        if (t < horizon) value += sol.dp.at(t + 1, model.transitions[model.transition_index(t, s, a)]);
        if (value > best) {
          best = value;
          best_action = a;
        }
      }
      sol.dp.at(t, s) = best;
      sol.actions[static_cast<std::size_t>(t - 1) * model.n_states + s] = best_action;
    }
  }
  return sol;
}

AbaResult train_aba_detailed(const Model& model, const AbaParams& params) {
  params.validate();
  const int n = model.n_agents;
  const int max_iterations = params.max_iterations > 0 ? params.max_iterations : 20 * n;

  AbaResult result;
  result.policy = params.init == PolicyInit::kRandom
                      ? JointPolicy::random(model, mix_seed(params.seed, 1))
                      : JointPolicy::constant(model, 0);
  Rng selector(mix_seed(params.seed, 2));
  std::uint64_t eval_seed = mix_seed(params.seed, 3);
  std::uint64_t fresh_stream = 4;

  // Simulates the current policy; on a singular point the evaluation seed is
  // replaced for the rest of the run.
  auto linearize = [&]() {
    for (int attempt = 0;; ++attempt) {
      auto ctx = LinearizationContext::from_trajectory(simulate(model, result.policy, eval_seed),
                                                       params.gamma);
      int singular = -1;
      for (int j = 0; j < n && singular < 0; ++j)
        if (ctx.g[j] + 1.0 == 0.0) singular = j;
      if (singular < 0) return ctx;
      if (attempt + 1 >= kSingularityRetries) throw WelfareSingularity(singular);
      eval_seed = mix_seed(params.seed, fresh_stream++);
    }
  };

  auto ctx = linearize();
  std::vector<double> history{ctx.welfare};
  for (int iteration = 1; iteration <= max_iterations; ++iteration) {
    const int agent = params.agent_selection == AgentSelection::kCyclic
                          ? (iteration - 1) % n
                          : uniform_index(selector, n);
    const auto sol = optimize_single_agent(model, ctx, agent);
    for (int t = 1; t <= model.horizon(); ++t)
      for (StateId s = 0; s < model.n_states; ++s) result.policy.set(agent, t, s, sol.act(t, s));

    const double before = ctx.welfare;
    ctx = linearize();
    result.log.push_back({iteration, agent, before, ctx.welfare});
    history.push_back(ctx.welfare);
    if (iteration >= n && history[iteration] - history[iteration - n] < params.delta) break;
  }
  return result;
}

JointPolicy train_aba(const Model& model, const AbaParams& params) {
  return train_aba_detailed(model, params).policy;
}

void write_aba_log_csv(std::ostream& os, std::span<const AbaLogEntry> log) {
  os << "iteration,selected_agent,welfare_before,welfare_after\n";
  for (const auto& e : log)
    os << e.iteration << ',' << e.selected_agent << ',' << format_double(e.welfare_before) << ','
       << format_double(e.welfare_after) << '\n';
}

}  // namespace cropmarl
