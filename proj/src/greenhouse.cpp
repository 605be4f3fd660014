#include "cropmarl/greenhouse.hpp"

#include <stdexcept>
#include <string>

#include "cropmarl/rng.hpp"

namespace cropmarl {

namespace {

/// First state index of crop c's block.
StateId crop_block_start(const std::vector<CropSpec>& crops, CropId c) {
  StateId start = 1;
  for (CropId k = 0; k < c; ++k)
    start += (crops[k].growth_duration - 1) + crops[k].harvest_window;
  return start;
}

}  // namespace

StateId growing_state(const std::vector<CropSpec>& crops, CropId c, int age) {
  if (age < 1 || age >= crops.at(c).growth_duration)
    throw std::out_of_range("growing_state: age out of range");
  return crop_block_start(crops, c) + (age - 1);
}

StateId mature_state(const std::vector<CropSpec>& crops, CropId c, int age) {
  if (age < 0 || age >= crops.at(c).harvest_window)
    throw std::out_of_range("mature_state: age out of range");
  return crop_block_start(crops, c) + (crops[c].growth_duration - 1) + age;
}

Model build_greenhouse_model(const std::vector<CropSpec>& crops, const PriceCurve& price,
                             const TimeGrid& time, int n_agents,
                             const std::vector<std::vector<double>>& initials,
                             std::uint64_t /*seed*/) {
  if (crops.empty()) throw std::invalid_argument("build_greenhouse_model: no crops given");
  if (time.horizon < 1 || time.days_per_step < 1)
    throw std::invalid_argument("build_greenhouse_model: invalid time grid");
  if (n_agents < 1) throw std::invalid_argument("build_greenhouse_model: n_agents must be >= 1");
  if (price.n_crops != static_cast<int>(crops.size()) || price.horizon < time.horizon)
    throw std::invalid_argument("build_greenhouse_model: price curve does not cover crops x horizon");
  for (std::size_t c = 0; c < crops.size(); ++c) {
    const auto& spec = crops[c];
    if (spec.growth_duration < 1 || spec.harvest_window < 1 || spec.plant_window.empty())
      throw std::invalid_argument("build_greenhouse_model: crop " + std::to_string(c) +
                                  " needs growth_duration >= 1, harvest_window >= 1 and a "
                                  "nonempty plant_window");
    for (int t : spec.plant_window)
      if (t < 1 || t > time.horizon)
        throw std::invalid_argument("build_greenhouse_model: crop " + std::to_string(c) +
                                    " plant_window contains timestep " + std::to_string(t) +
                                    " outside the horizon");
  }

  const auto n_crops = static_cast<CropId>(crops.size());
  Model model;
  model.n_agents = n_agents;
  model.time = time;
  model.n_actions = 2 + n_crops;
  model.n_states = crop_block_start(crops, n_crops);

  model.state_labels.assign(model.n_states, "");
  model.state_labels[kEmpty] = "Empty";
  model.reward.harvestable.assign(model.n_states, kNoCrop);
  for (CropId c = 0; c < n_crops; ++c) {
    for (int k = 1; k < crops[c].growth_duration; ++k)
      model.state_labels[growing_state(crops, c, k)] =
          "Growing(" + std::to_string(c) + "," + std::to_string(k) + ")";
    for (int m = 0; m < crops[c].harvest_window; ++m) {
      const StateId s = mature_state(crops, c, m);
      model.state_labels[s] = "Mature(" + std::to_string(c) + "," + std::to_string(m) + ")";
      model.reward.harvestable[s] = c;
    }
  }
  model.action_labels = {"Wait", "Harvest"};
  for (CropId c = 0; c < n_crops; ++c) model.action_labels.push_back("Plant(" + std::to_string(c) + ")");

  model.reset_transitions();
  for (int t = 1; t <= time.horizon; ++t) {
    for (CropId c = 0; c < n_crops; ++c) {
      const auto& spec = crops[c];
      if (spec.plant_window.contains(t)) {
        const StateId sprout =
            spec.growth_duration > 1 ? growing_state(crops, c, 1) : mature_state(crops, c, 0);
        model.set_transition(t, kEmpty, plant_action(c), sprout);
      }
      for (int k = 1; k < spec.growth_duration; ++k) {
        const StateId next =
            k + 1 < spec.growth_duration ? growing_state(crops, c, k + 1) : mature_state(crops, c, 0);
        for (ActionId a = 0; a < model.n_actions; ++a)
          model.set_transition(t, growing_state(crops, c, k), a, next);
      }
      for (int m = 0; m < spec.harvest_window; ++m) {
        const StateId next = m + 1 < spec.harvest_window ? mature_state(crops, c, m + 1) : kEmpty;
        for (ActionId a = 0; a < model.n_actions; ++a)
          model.set_transition(t, mature_state(crops, c, m), a, a == kHarvest ? kEmpty : next);
      }
    }
  }

  model.reward.price = price;
  model.reward.harvest_action = kHarvest;

  if (initials.empty()) {
    std::vector<double> empty(model.n_states, 0.0);
    empty[kEmpty] = 1.0;
    model.initials.assign(n_agents, empty);
  } else if (initials.size() == 1) {
    model.initials.assign(n_agents, initials.front());
  } else {
    model.initials = initials;
  }
  return model;
}

Model build_random_mdp(int n_states, int n_actions, int n_crops, const TimeGrid& time,
                       int n_agents, std::uint64_t seed, double slope_coefficient) {
  if (n_states < 1 || n_actions < 1 || n_crops < 1 || n_agents < 1 || time.horizon < 1 ||
      time.days_per_step < 1)
    throw std::invalid_argument("build_random_mdp: all counts must be >= 1");
  if (!(slope_coefficient > 0.0))
    throw std::invalid_argument("build_random_mdp: slope_coefficient must be > 0");

  Rng rng(seed);
  Model model;
  model.n_agents = n_agents;
  model.time = time;
  model.n_states = n_states;
  model.n_actions = n_actions;
  for (int s = 0; s < n_states; ++s) model.state_labels.push_back("s" + std::to_string(s));
  for (int a = 0; a < n_actions; ++a) model.action_labels.push_back("a" + std::to_string(a));

  model.transitions.resize(static_cast<std::size_t>(time.horizon) * n_states * n_actions);
  for (auto& next : model.transitions) next = uniform_index(rng, n_states);

  model.reward.harvestable.assign(n_states, kNoCrop);
  for (auto& crop : model.reward.harvestable) {
    const bool harvestable = uniform01(rng) < 0.3;
    const CropId c = uniform_index(rng, n_crops);
    if (harvestable) crop = c;
  }
  model.reward.harvest_action = 0;

  PriceCurve curve(time.horizon, n_crops, -1.0, 50.0, slope_coefficient);
  for (int t = 1; t <= time.horizon; ++t)
    for (CropId c = 0; c < n_crops; ++c) {
      curve.slope(t, c) = uniform_real(rng, -5.0, -1.0);
      curve.intercept(t, c) = uniform_real(rng, 50.0, 150.0);
    }
  model.reward.price = std::move(curve);

  model.initials.assign(n_agents, std::vector<double>(n_states, 1.0 / n_states));
  if (n_states == 1) model.initials.assign(n_agents, {1.0});
  return model;
}

}  // namespace cropmarl
