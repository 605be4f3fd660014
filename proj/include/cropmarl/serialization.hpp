#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "cropmarl/greenhouse.hpp"
#include "cropmarl/model.hpp"

namespace cropmarl {

using json = nlohmann::json;

/// Raised for malformed configuration or model documents; `field` names the
/// offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Model document: n_agents, horizon, days_per_step, n_states, n_actions,
/// labels, transitions [t][s][a], initials [agent][state], plus the market.
json model_to_json(const Model& model);
Model model_from_json(const json& doc);

json policy_to_json(const JointPolicy& policy);
JointPolicy policy_from_json(const json& doc);

/// Greenhouse/market configuration.
struct GreenhouseConfig {
  std::vector<CropSpec> crops;
  /// Scalars broadcast; per-crop vectors apply to every timestep; [t][c]
  /// matrices are taken verbatim.
  json price_a = -0.2;
  json price_b = 140.0;
  double slope_coefficient = 500.0;
  int n_agents = 5;
  TimeGrid time{12, 14};
  std::vector<std::vector<double>> initials;
};

GreenhouseConfig greenhouse_config_from_json(const json& doc);
json greenhouse_config_to_json(const GreenhouseConfig& config);

/// The default benchmark environment: three crops with staggered growth
/// cycles and seasonal planting windows derived from the horizon.
GreenhouseConfig default_greenhouse_config(int horizon = 12);

/// Resolves the price section against a horizon and slope.
PriceCurve build_price_curve(const GreenhouseConfig& config);

Model build_greenhouse_model(const GreenhouseConfig& config);

}  // namespace cropmarl
