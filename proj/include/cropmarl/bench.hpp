#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cropmarl/aba.hpp"
#include "cropmarl/iql.hpp"
#include "cropmarl/serialization.hpp"

namespace cropmarl {

enum class ExperimentKind { kJointReward, kRuntime, kSlopeSweep, kDiscountSweep, kSimulate };
enum class PolicyKind { kIql, kAba, kRollout };
enum class ModelKind { kGreenhouse, kRandomMdp };

std::string to_string(ExperimentKind kind);
std::string to_string(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

struct RandomMdpSpec {
  int n_states = 10;
  int n_actions = 3;
  int n_crops = 2;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kJointReward;
  std::vector<PolicyKind> policies{PolicyKind::kIql, PolicyKind::kAba, PolicyKind::kRollout};
  std::vector<int> agent_counts{5};
  std::vector<double> gammas{0.9};
  std::vector<double> slope_coefficients{500.0};
  int horizon = 12;
  int days_per_step = 14;
  std::vector<std::uint64_t> seeds{1};
  int eval_seeds = 16;
  ModelKind model = ModelKind::kGreenhouse;
  GreenhouseConfig greenhouse = default_greenhouse_config();
  RandomMdpSpec random_mdp;
  IqlParams iql{.alpha = 0.1, .epsilon = 0.1, .episodes = 500};
  AbaParams aba;
  std::string output;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Parses a JSON experiment config; unspecified fields keep desk-scale
/// defaults.
ExperimentConfig experiment_config_from_json(const json& doc);

/// Desk-scale defaults for an experiment kind.
ExperimentConfig default_experiment_config(ExperimentKind kind);

/// Restores the full-size experimental grid: T = 26, 1000 IQL episodes,
/// 5..20 agents (2 for the sweeps), slope 500..1500, discount 0.3..0.9.
void apply_paper_scale(ExperimentConfig& config);

struct ResultRow {
  std::string experiment;
  std::string policy;
  int n_agents = 0;
  double gamma = 0.0;
  double slope_coefficient = 0.0;
  std::uint64_t seed = 0;
  /// -1 marks the aggregate row of a group.
  int agent_id = -1;
  /// Seed-averaged discounted return (sum over agents for aggregates).
  double return_value = 0.0;
  /// Seed-averaged undiscounted reward (sum over agents for aggregates).
  double total_reward = 0.0;
  /// U of the seed-averaged discounted returns.
  double welfare = 0.0;
  double runtime_ms = 0.0;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kResultHeader =
    "experiment,policy,n_agents,gamma,slope_coefficient,seed,agent_id,return,total_reward,"
    "welfare,runtime_ms";

/// One grid point: build the model, plan with one policy, evaluate.
struct GridPoint {
  PolicyKind policy;
  int n_agents;
  double gamma;
  double slope_coefficient;
  std::uint64_t seed;
};

std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

/// Model for a grid point (construction is excluded from runtime).
Model build_experiment_model(const ExperimentConfig& config, const GridPoint& point);

/// Plans and evaluates one grid point; aggregate row first, then agents.
std::vector<ResultRow> run_grid_point(const ExperimentConfig& config, const GridPoint& point);

std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Worker cap from MARL_THREADS (default: hardware concurrency).
int worker_count();

void write_results(const std::vector<ResultRow>& rows, std::ostream& os);
/// Throws std::runtime_error naming the path on I/O failure.
void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_results(std::istream& is);
std::vector<ResultRow> read_results(const std::filesystem::path& path);

}  // namespace cropmarl
