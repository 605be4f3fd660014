#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "cropmarl/model.hpp"

namespace cropmarl {

/// Seasonality and life cycle of one crop.
struct CropSpec {
  /// Timesteps (1-based) at which planting is allowed.
  std::set<int> plant_window;
  /// Timesteps from planting to maturity.
  int growth_duration = 1;
  /// Timesteps a mature crop stays harvestable before it spoils.
  int harvest_window = 1;
};

/// Action layout of greenhouse models.
inline constexpr ActionId kWait = 0;
inline constexpr ActionId kHarvest = 1;
inline constexpr ActionId plant_action(CropId c) { return 2 + c; }

/// State layout of greenhouse models: Empty first, then per crop its
/// Growing(c, 1..g-1) states followed by Mature(c, 0..w-1).
inline constexpr StateId kEmpty = 0;
StateId growing_state(const std::vector<CropSpec>& crops, CropId c, int age);
StateId mature_state(const std::vector<CropSpec>& crops, CropId c, int age);

/**
 * Builds the parametric greenhouse model. Invalid actions (planting outside
 * the window or into an occupied greenhouse, harvesting an immature crop)
 * behave as Wait. An empty `initials` puts every agent in Empty; a single
 * row is shared by all agents.
 *
 * The seed is accepted for interface symmetry with build_random_mdp; the
 * greenhouse construction itself is deterministic.
 */
Model build_greenhouse_model(const std::vector<CropSpec>& crops, const PriceCurve& price,
                             const TimeGrid& time, int n_agents,
                             const std::vector<std::vector<double>>& initials,
                             std::uint64_t seed = 0);

/**
 * Generic random MDP for runtime experiments: uniform deterministic
 * successors per (t, s, a), each state harvestable with probability 0.3 for a
 * uniformly drawn crop, a in [-5, -1] and b in [50, 150] per (t, c). Action 0
 * is the harvest action and every agent starts uniformly over states.
 */
Model build_random_mdp(int n_states, int n_actions, int n_crops, const TimeGrid& time,
                       int n_agents, std::uint64_t seed, double slope_coefficient = 1.0);

}  // namespace cropmarl
