#include "cropmarl/market.hpp"

#include <sstream>
#include <stdexcept>

#include "cropmarl/model.hpp"

namespace cropmarl {

PriceCurve::PriceCurve(int horizon, int n_crops, double a_all, double b_all,
                       double slope_coefficient)
    : horizon(horizon), n_crops(n_crops),
      a(static_cast<std::size_t>(horizon) * n_crops, a_all),
      b(static_cast<std::size_t>(horizon) * n_crops, b_all),
      slope_coefficient(slope_coefficient) {}

double price(const PriceCurve& curve, int t, CropId c, int d) {
  if (d < 1) {
    std::ostringstream msg;
    msg << "price quoted with d=" << d << " sellers; at least one is required";
    throw std::invalid_argument(msg.str());
  }
  if (t < 1 || t > curve.horizon) throw std::out_of_range("price: timestep out of range");
  if (c < 0 || c >= curve.n_crops) throw std::out_of_range("price: crop out of range");
  return price_unchecked(curve, t, c, d);
}

std::vector<int> harvest_counts(const Model& model, std::span<const StateId> states,
                                std::span<const ActionId> actions) {
  if (states.size() != actions.size())
    throw std::invalid_argument("harvest_counts: states and actions differ in length");
  std::vector<int> counts(model.reward.price.n_crops, 0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CropId c = model.reward.harvested_crop(states[i], actions[i]);
    if (c != kNoCrop) ++counts[c];
  }
  return counts;
}

void joint_reward_into(const Model& model, int t, std::span<const StateId> states,
                       std::span<const ActionId> actions, std::vector<int>& counts,
                       std::span<double> out) {
  const auto& market = model.reward;
  counts.assign(market.price.n_crops, 0);
  const std::size_t n = states.size();
  for (std::size_t i = 0; i < n; ++i) {
    const CropId c = market.harvested_crop(states[i], actions[i]);
    if (c != kNoCrop) ++counts[c];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const CropId c = market.harvested_crop(states[i], actions[i]);
    out[i] = c == kNoCrop ? 0.0 : price_unchecked(market.price, t, c, counts[c]);
  }
}

std::vector<double> joint_reward(const Model& model, int t, std::span<const StateId> states,
                                 std::span<const ActionId> actions) {
  const auto n = static_cast<std::size_t>(model.n_agents);
  if (states.size() != n || actions.size() != n) {
    std::ostringstream msg;
    msg << "joint_reward: expected " << n << " states and actions, got " << states.size()
        << " and " << actions.size();
    throw std::invalid_argument(msg.str());
  }
  if (t < 1 || t > model.horizon()) throw std::out_of_range("joint_reward: timestep out of range");
  for (std::size_t i = 0; i < n; ++i) {
    if (states[i] < 0 || states[i] >= model.n_states)
      throw std::out_of_range("joint_reward: state out of range for agent " + std::to_string(i));
    if (actions[i] < 0 || actions[i] >= model.n_actions)
      throw std::out_of_range("joint_reward: action out of range for agent " + std::to_string(i));
  }
  std::vector<double> out(n);
  std::vector<int> counts;
  joint_reward_into(model, t, states, actions, counts, out);
  return out;
}

}  // namespace cropmarl
