#pragma once

#include <span>
#include <vector>

#include "cropmarl/types.hpp"

namespace cropmarl {

struct Model;

/**
 * Linear supply-sensitive price lines, one per (timestep, crop):
 *
 *   Y_{t,c}(d) = a_{t,c} * (slope_coefficient * d) + b_{t,c}
 *
 * where d is the number of agents validly harvesting crop c at t. With
 * a < 0 and slope_coefficient > 0 the price strictly falls with supply and
 * may go negative under oversupply.
 */
struct PriceCurve {
  int horizon = 0;
  int n_crops = 0;
  /// [t-1][c], flattened.
  std::vector<double> a;
  std::vector<double> b;
  double slope_coefficient = 1.0;

  PriceCurve() = default;
  PriceCurve(int horizon, int n_crops, double a_all, double b_all,
             double slope_coefficient);

  double& slope(int t, CropId c) { return a[index(t, c)]; }
  double& intercept(int t, CropId c) { return b[index(t, c)]; }
  double slope(int t, CropId c) const { return a[index(t, c)]; }
  double intercept(int t, CropId c) const { return b[index(t, c)]; }

  std::size_t index(int t, CropId c) const {
    return static_cast<std::size_t>(t - 1) * n_crops + c;
  }

  bool operator==(const PriceCurve&) const = default;
};

/// Market price at (t, c) with d >= 1 sellers. Throws std::invalid_argument
/// for d < 1 and std::out_of_range for bad (t, c).
double price(const PriceCurve& curve, int t, CropId c, int d);

/// Unchecked price for inner loops.
inline double price_unchecked(const PriceCurve& curve, int t, CropId c, int d) {
  return curve.slope(t, c) * (curve.slope_coefficient * d) + curve.intercept(t, c);
}

/// Which states can be sold (and as which crop) plus the price lines.
struct MarketRewardFunction {
  PriceCurve price;
  /// Per state: the crop a harvest in this state sells, or kNoCrop.
  std::vector<CropId> harvestable;
  ActionId harvest_action = 0;

  /// Crop sold by a valid harvest of (s, a), or kNoCrop.
  CropId harvested_crop(StateId s, ActionId a) const {
    return a == harvest_action ? harvestable[s] : kNoCrop;
  }

  bool operator==(const MarketRewardFunction&) const = default;
};

/// d_{t,c}: number of valid harvesters of each crop.
std::vector<int> harvest_counts(const Model& model, std::span<const StateId> states,
                                std::span<const ActionId> actions);

/// Joint reward vector. Throws std::invalid_argument on length mismatch.
std::vector<double> joint_reward(const Model& model, int t,
                                 std::span<const StateId> states,
                                 std::span<const ActionId> actions);

/// Same as joint_reward but writes into `out` and reuses `counts` as scratch.
/// No range checks.
void joint_reward_into(const Model& model, int t, std::span<const StateId> states,
                       std::span<const ActionId> actions, std::vector<int>& counts,
                       std::span<double> out);

}  // namespace cropmarl
