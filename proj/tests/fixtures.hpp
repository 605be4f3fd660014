#pragma once

#include <cstdint>
#include <vector>

#include "cropmarl/greenhouse.hpp"
#include "cropmarl/model.hpp"
#include "cropmarl/rng.hpp"

namespace fixtures {

using namespace cropmarl;

inline constexpr StateId kMature = 0;
inline constexpr StateId kChainEmpty = 1;
inline constexpr ActionId kChainWait = 0;
inline constexpr ActionId kChainHarvest = 1;

// Two states: Mature sells crop 0 on Harvest and moves to Empty; Wait keeps
// it Mature. Empty is absorbing with no reward. Price a=-2, b=100, slope 1,
// so a lone seller earns 98.
inline Model chain_model(int horizon = 2, int n_agents = 1) {
  Model m;
  m.n_agents = n_agents;
  m.time = {horizon, 1};
  m.n_states = 2;
  m.n_actions = 2;
  m.state_labels = {"Mature", "Empty"};
  m.action_labels = {"Wait", "Harvest"};
  m.reset_transitions();
  for (int t = 1; t <= horizon; ++t) m.set_transition(t, kMature, kChainHarvest, kChainEmpty);
  m.initials.assign(n_agents, {1.0, 0.0});
  m.reward.price = PriceCurve(horizon, 1, -2.0, 100.0, 1.0);
  m.reward.harvestable = {0, kNoCrop};
  m.reward.harvest_action = kChainHarvest;
  return m;
}

// A model with no harvestable state: every reward is zero.
inline Model zero_model(int n_states, int n_actions, int horizon, int n_agents, std::uint64_t seed) {
  Model m = build_random_mdp(n_states, n_actions, 1, {horizon, 1}, n_agents, seed);
  m.reward.harvestable.assign(n_states, kNoCrop);
  return m;
}

// One crop, growth 1, always plantable, every agent starts Empty.
inline Model single_crop_model(int horizon, int n_agents, double a, double b, double slope,
                               int harvest_window = 1) {
  CropSpec crop;
  for (int t = 1; t <= horizon; ++t) crop.plant_window.insert(t);
  crop.growth_duration = 1;
  crop.harvest_window = harvest_window;
  return build_greenhouse_model({crop}, PriceCurve(horizon, 1, a, b, slope), {horizon, 1},
                                n_agents, {});
}

inline JointPolicy random_policy(const Model& m, std::uint64_t seed) {
  return JointPolicy::random(m, seed);
}

}  // namespace fixtures
