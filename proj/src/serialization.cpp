#include "cropmarl/serialization.hpp"

#include <cmath>

namespace cropmarl {

namespace {

template <typename T>
T require(const json& doc, const char* field) {
  if (!doc.contains(field)) throw ConfigError(field, "missing required field");
  try {
    return doc.at(field).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

template <typename T>
T optional_field(const json& doc, const char* field, T fallback) {
  if (!doc.contains(field) || doc.at(field).is_null()) return fallback;
  try {
    return doc.at(field).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

/// Expands a scalar, per-crop vector, or [t][c] matrix into a flat table.
std::vector<double> expand_price_table(const json& spec, const char* field, int horizon,
                                       int n_crops) {
  std::vector<double> out(static_cast<std::size_t>(horizon) * n_crops);
  try {
    if (spec.is_number()) {
      std::fill(out.begin(), out.end(), spec.get<double>());
      return out;
    }
    if (!spec.is_array()) throw ConfigError(field, "expected a number or an array");
    if (!spec.empty() && spec.front().is_number()) {
      if (static_cast<int>(spec.size()) != n_crops)
        throw ConfigError(field, "per-crop vector must have one entry per crop");
      for (int t = 0; t < horizon; ++t)
        for (int c = 0; c < n_crops; ++c) out[static_cast<std::size_t>(t) * n_crops + c] = spec[c];
      return out;
    }
    if (static_cast<int>(spec.size()) < horizon)
      throw ConfigError(field, "per-timestep table must cover the horizon");
    for (int t = 0; t < horizon; ++t) {
      if (static_cast<int>(spec[t].size()) != n_crops)
        throw ConfigError(field, "per-timestep row must have one entry per crop");
      for (int c = 0; c < n_crops; ++c)
        out[static_cast<std::size_t>(t) * n_crops + c] = spec[t][c].get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
  return out;
}

json price_table_to_json(const std::vector<double>& flat, int horizon, int n_crops) {
  json rows = json::array();
  for (int t = 0; t < horizon; ++t) {
    json row = json::array();
    for (int c = 0; c < n_crops; ++c) row.push_back(flat[static_cast<std::size_t>(t) * n_crops + c]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}

json model_to_json(const Model& model) {
  json doc;
  doc["n_agents"] = model.n_agents;
  doc["horizon"] = model.time.horizon;
  doc["days_per_step"] = model.time.days_per_step;
  doc["n_states"] = model.n_states;
  doc["n_actions"] = model.n_actions;
  doc["labels"] = {{"states", model.state_labels}, {"actions", model.action_labels}};

  json transitions = json::array();
  for (int t = 1; t <= model.time.horizon; ++t) {
    json per_state = json::array();
    for (StateId s = 0; s < model.n_states; ++s) {
      json per_action = json::array();
      for (ActionId a = 0; a < model.n_actions; ++a)
        per_action.push_back(model.transitions[model.transition_index(t, s, a)]);
      per_state.push_back(std::move(per_action));
    }
    transitions.push_back(std::move(per_state));
  }
  doc["transitions"] = std::move(transitions);
  doc["initials"] = model.initials;

  const auto& curve = model.reward.price;
  doc["market"] = {
      {"harvest_action", model.reward.harvest_action},
      {"harvestable", model.reward.harvestable},
      {"n_crops", curve.n_crops},
      {"price_horizon", curve.horizon},
      {"slope_coefficient", curve.slope_coefficient},
      {"a", price_table_to_json(curve.a, curve.horizon, curve.n_crops)},
      {"b", price_table_to_json(curve.b, curve.horizon, curve.n_crops)},
  };
  return doc;
}

Model model_from_json(const json& doc) {
  Model model;
  model.n_agents = require<int>(doc, "n_agents");
  model.time.horizon = require<int>(doc, "horizon");
  model.time.days_per_step = require<int>(doc, "days_per_step");
  model.n_states = require<int>(doc, "n_states");
  model.n_actions = require<int>(doc, "n_actions");
  if (model.time.horizon < 1 || model.n_states < 1 || model.n_actions < 1)
    throw ConfigError("horizon", "horizon, n_states and n_actions must be >= 1");
  if (doc.contains("labels")) {
    const auto& labels = doc.at("labels");
    model.state_labels = optional_field<std::vector<std::string>>(labels, "states", {});
    model.action_labels = optional_field<std::vector<std::string>>(labels, "actions", {});
  }

  const auto transitions = require<std::vector<std::vector<std::vector<StateId>>>>(doc, "transitions");
  if (static_cast<int>(transitions.size()) != model.time.horizon)
    throw ConfigError("transitions", "expected one table per timestep");
  model.transitions.resize(static_cast<std::size_t>(model.time.horizon) * model.n_states *
                           model.n_actions);
  for (int t = 1; t <= model.time.horizon; ++t) {
    const auto& per_state = transitions[t - 1];
    if (static_cast<int>(per_state.size()) != model.n_states)
      throw ConfigError("transitions", "expected one row per state at t=" + std::to_string(t));
    for (StateId s = 0; s < model.n_states; ++s) {
      if (static_cast<int>(per_state[s].size()) != model.n_actions)
        throw ConfigError("transitions", "expected one entry per action");
      for (ActionId a = 0; a < model.n_actions; ++a)
        model.transitions[model.transition_index(t, s, a)] = per_state[s][a];
    }
  }
  model.initials = require<std::vector<std::vector<double>>>(doc, "initials");

  if (!doc.contains("market")) throw ConfigError("market", "missing required field");
  const auto& market = doc.at("market");
  model.reward.harvest_action = require<ActionId>(market, "harvest_action");
  model.reward.harvestable = require<std::vector<CropId>>(market, "harvestable");
  auto& curve = model.reward.price;
  curve.n_crops = require<int>(market, "n_crops");
  curve.horizon = optional_field<int>(market, "price_horizon", model.time.horizon);
  curve.slope_coefficient = require<double>(market, "slope_coefficient");
  if (curve.n_crops < 1 || curve.horizon < 1)
    throw ConfigError("market", "n_crops and price_horizon must be >= 1");
  if (!market.contains("a")) throw ConfigError("market.a", "missing required field");
  if (!market.contains("b")) throw ConfigError("market.b", "missing required field");
  curve.a = expand_price_table(market.at("a"), "market.a", curve.horizon, curve.n_crops);
  curve.b = expand_price_table(market.at("b"), "market.b", curve.horizon, curve.n_crops);
  return model;
}

json policy_to_json(const JointPolicy& policy) {
  json actions = json::array();
  for (int i = 0; i < policy.n_agents(); ++i) {
    json per_t = json::array();
    for (int t = 1; t <= policy.horizon(); ++t) {
      json per_s = json::array();
      for (StateId s = 0; s < policy.n_states(); ++s) per_s.push_back(policy.get(i, t, s));
      per_t.push_back(std::move(per_s));
    }
    actions.push_back(std::move(per_t));
  }
  return {{"n_agents", policy.n_agents()},
          {"horizon", policy.horizon()},
          {"n_states", policy.n_states()},
          {"n_actions", policy.n_actions()},
          {"actions", std::move(actions)}};
}

JointPolicy policy_from_json(const json& doc) {
  const int n_agents = require<int>(doc, "n_agents");
  const int horizon = require<int>(doc, "horizon");
  const int n_states = require<int>(doc, "n_states");
  const int n_actions = require<int>(doc, "n_actions");
  if (n_agents < 1 || horizon < 1 || n_states < 1 || n_actions < 1)
    throw ConfigError("n_agents", "policy dimensions must be >= 1");
  JointPolicy policy(n_agents, horizon, n_states, n_actions);
  const auto actions = require<std::vector<std::vector<std::vector<ActionId>>>>(doc, "actions");
  if (static_cast<int>(actions.size()) != policy.n_agents())
    throw ConfigError("actions", "expected one table per agent");
  for (int i = 0; i < policy.n_agents(); ++i) {
    if (static_cast<int>(actions[i].size()) != policy.horizon())
      throw ConfigError("actions", "expected one row per timestep");
    for (int t = 1; t <= policy.horizon(); ++t) {
      if (static_cast<int>(actions[i][t - 1].size()) != policy.n_states())
        throw ConfigError("actions", "expected one entry per state");
      for (StateId s = 0; s < policy.n_states(); ++s) {
        try {
          policy.set(i, t, s, actions[i][t - 1][s]);
        } catch (const std::out_of_range& e) {
          throw ConfigError("actions", e.what());
        }
      }
    }
  }
  return policy;
}

GreenhouseConfig default_greenhouse_config(int horizon) {
  GreenhouseConfig config;
  config.time.horizon = horizon;
  auto every = [](int first, int last, int step) {
    std::set<int> window;
    for (int t = first; t <= last; t += step) window.insert(t);
    return window;
  };
  config.crops = {
      {every(1, horizon, 2), 2, 1},
      {every(1, horizon, 1), 3, 1},
      {every(1, horizon, 1), 4, 1},
  };
  config.price_a = json::array({-0.2, -0.2, -0.2});
  config.price_b = json::array({120.0, 140.0, 160.0});
  return config;
}

GreenhouseConfig greenhouse_config_from_json(const json& doc) {
  GreenhouseConfig config = default_greenhouse_config();
  config.time.horizon = optional_field<int>(doc, "horizon", config.time.horizon);
  config.time.days_per_step = optional_field<int>(doc, "days_per_step", config.time.days_per_step);
  config.n_agents = optional_field<int>(doc, "n_agents", config.n_agents);
  config.slope_coefficient =
      optional_field<double>(doc, "slope_coefficient", config.slope_coefficient);
  if (config.time.horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (config.time.days_per_step < 1) throw ConfigError("days_per_step", "must be >= 1");
  if (config.n_agents < 1) throw ConfigError("n_agents", "must be >= 1");
  if (!(config.slope_coefficient > 0.0)) throw ConfigError("slope_coefficient", "must be > 0");

  if (doc.contains("crops")) {
    const auto& crops = doc.at("crops");
    if (!crops.is_array() || crops.empty()) throw ConfigError("crops", "expected a nonempty array");
    config.crops.clear();
    for (const auto& entry : crops) {
      CropSpec spec;
      spec.growth_duration = require<int>(entry, "growth_duration");
      spec.harvest_window = require<int>(entry, "harvest_window");
      const auto& window = entry.contains("plant_window") ? entry.at("plant_window") : json("all");
      if (window.is_string() && window.get<std::string>() == "all") {
        for (int t = 1; t <= config.time.horizon; ++t) spec.plant_window.insert(t);
      } else {
        try {
          for (int t : window.get<std::vector<int>>()) spec.plant_window.insert(t);
        } catch (const json::exception& e) {
          throw ConfigError("crops.plant_window", e.what());
        }
      }
      if (spec.growth_duration < 1) throw ConfigError("crops.growth_duration", "must be >= 1");
      if (spec.harvest_window < 1) throw ConfigError("crops.harvest_window", "must be >= 1");
      if (spec.plant_window.empty()) throw ConfigError("crops.plant_window", "must be nonempty");
      for (int t : spec.plant_window)
        if (t < 1 || t > config.time.horizon)
          throw ConfigError("crops.plant_window", "timestep " + std::to_string(t) +
                                                      " lies outside the horizon");
      config.crops.push_back(std::move(spec));
    }
  } else {
    config.crops = default_greenhouse_config(config.time.horizon).crops;
  }

  if (doc.contains("price")) {
    const auto& price = doc.at("price");
    if (price.contains("a")) config.price_a = price.at("a");
    if (price.contains("b")) config.price_b = price.at("b");
  }
  if (doc.contains("initials"))
    config.initials = require<std::vector<std::vector<double>>>(doc, "initials");
  // Validate the price shapes early so errors name the config field.
  build_price_curve(config);
  return config;
}

json greenhouse_config_to_json(const GreenhouseConfig& config) {
  json crops = json::array();
  for (const auto& spec : config.crops)
    crops.push_back({{"plant_window", std::vector<int>(spec.plant_window.begin(), spec.plant_window.end())},
                     {"growth_duration", spec.growth_duration},
                     {"harvest_window", spec.harvest_window}});
  json doc = {{"crops", std::move(crops)},
              {"price", {{"a", config.price_a}, {"b", config.price_b}}},
              {"slope_coefficient", config.slope_coefficient},
              {"n_agents", config.n_agents},
              {"horizon", config.time.horizon},
              {"days_per_step", config.time.days_per_step}};
  if (!config.initials.empty()) doc["initials"] = config.initials;
  return doc;
}

PriceCurve build_price_curve(const GreenhouseConfig& config) {
  const int n_crops = static_cast<int>(config.crops.size());
  PriceCurve curve;
  curve.horizon = config.time.horizon;
  curve.n_crops = n_crops;
  curve.slope_coefficient = config.slope_coefficient;
  curve.a = expand_price_table(config.price_a, "price.a", curve.horizon, n_crops);
  curve.b = expand_price_table(config.price_b, "price.b", curve.horizon, n_crops);
  for (double a : curve.a)
    if (!(a < 0.0)) throw ConfigError("price.a", "every slope parameter must be < 0");
  for (double b : curve.b)
    if (!(b > 0.0)) throw ConfigError("price.b", "every intercept must be > 0");
  return curve;
}

Model build_greenhouse_model(const GreenhouseConfig& config) {
  return build_greenhouse_model(config.crops, build_price_curve(config), config.time,
                                config.n_agents, config.initials);
}

}  // namespace cropmarl
