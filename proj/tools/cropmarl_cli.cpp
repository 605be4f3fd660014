// Command-line front end: simulate, train and bench subcommands.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cropmarl/aba.hpp"
#include "cropmarl/base_lp.hpp"
#include "cropmarl/bench.hpp"
#include "cropmarl/iql.hpp"
#include "cropmarl/rng.hpp"
#include "cropmarl/rollout.hpp"
#include "cropmarl/serialization.hpp"
#include "cropmarl/sim.hpp"

namespace fs = std::filesystem;
using namespace cropmarl;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct CommonOptions {
  std::string config_path;
  std::string model_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string policy;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment config");
  cmd->add_option("--out", opts.out, "Output path");
  cmd->add_option("--seed", opts.seed, "Seed (replaces the config seed list)");
  cmd->add_option("--policy", opts.policy, "iql | aba | rollout")
      ->check(CLI::IsMember({"iql", "aba", "rollout"}));
  cmd->add_flag("--paper-scale", opts.paper_scale, "Full-size experimental grid");
}

ExperimentConfig load_config(const CommonOptions& opts, ExperimentKind fallback) {
  ExperimentConfig config = default_experiment_config(fallback);
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("--config", "cannot open '" + opts.config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config", e.what());
    }
    config = experiment_config_from_json(doc);
  }
  if (opts.paper_scale) apply_paper_scale(config);
  if (opts.seed) config.seeds = {*opts.seed};
  if (!opts.policy.empty()) config.policies = {parse_policy(opts.policy)};
  if (!opts.out.empty()) config.output = opts.out;
  config.validate();
  return config;
}

/// Model of the first grid point, or the serialized model from --model.
Model load_model(const CommonOptions& opts, const ExperimentConfig& config,
                 const GridPoint& point) {
  if (opts.model_path.empty()) return build_experiment_model(config, point);
  std::ifstream in(opts.model_path);
  if (!in) throw ConfigError("--model", "cannot open '" + opts.model_path + "'");
  Model model = model_from_json(json::parse(in));
  const auto issues = validate_model(model);
  if (!issues.empty()) throw ConfigError("--model", issues.front());
  return model;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

int run_bench(const CommonOptions& opts) {
  const auto config = load_config(opts, ExperimentKind::kJointReward);
  if (config.output.empty()) throw ConfigError("--out", "an output path is required");
  const auto rows = run_experiment(config);
  write_results(rows, fs::path(config.output));
  std::cerr << "wrote " << rows.size() << " rows to " << config.output << '\n';
  return 0;
}

int run_train(const CommonOptions& opts) {
  const auto config = load_config(opts, ExperimentKind::kJointReward);
  if (config.output.empty()) throw ConfigError("--out", "an output directory is required");
  const fs::path dir(config.output);
  fs::create_directories(dir);
  const GridPoint point = expand_grid(config).front();
  const Model model = load_model(opts, config, point);
  const std::uint64_t seed = point.seed;

  open_output(dir / "model.json") << model_to_json(model).dump(1) << '\n';
  JointPolicy policy;
  switch (point.policy) {
    case PolicyKind::kIql: {
      IqlParams params = config.iql;
      params.gamma = point.gamma;
      params.seed = seed;
      const auto result = train_iql_detailed(model, params);
      auto q = open_output(dir / "q_tables.csv");
      write_q_tables_csv(q, result.q);
      auto log = open_output(dir / "training_log.csv");
      write_iql_log_csv(log, result.episode_rewards);
      policy = result.policy;
      break;
    }
    case PolicyKind::kAba: {
      AbaParams params = config.aba;
      params.gamma = point.gamma;
      params.seed = seed;
      const auto result = train_aba_detailed(model, params);
      auto log = open_output(dir / "training_log.csv");
      write_aba_log_csv(log, result.log);
      policy = result.policy;
      break;
    }
    case PolicyKind::kRollout: {
      const auto base = solve_base_policy(model, point.gamma);
      auto values = open_output(dir / "value_function.csv");
      write_value_function_csv(values, base);
      const auto result = run_rollout(model, base, {point.gamma, seed});
      auto decisions = open_output(dir / "decisions.csv");
      write_decisions_csv(decisions, result.decisions);
      auto traj = open_output(dir / "trajectory.csv");
      write_trajectory_csv(traj, result.trajectory);
      policy = result.policy;
      break;
    }
  }
  open_output(dir / "policy.json") << policy_to_json(policy).dump() << '\n';
  std::cerr << "trained " << to_string(point.policy) << " into " << dir.string() << '\n';
  return 0;
}

int run_simulate(const CommonOptions& opts) {
  const auto config = load_config(opts, ExperimentKind::kSimulate);
  const GridPoint point = expand_grid(config).front();
  const Model model = load_model(opts, config, point);
  const std::uint64_t train_seed = mix_seed(point.seed, 100);

  Trajectory traj;
  switch (point.policy) {
    case PolicyKind::kIql: {
      IqlParams params = config.iql;
      params.gamma = point.gamma;
      params.seed = train_seed;
      traj = simulate(model, train_iql(model, params), point.seed);
      break;
    }
    case PolicyKind::kAba: {
      AbaParams params = config.aba;
      params.gamma = point.gamma;
      params.seed = train_seed;
      traj = simulate(model, train_aba(model, params), point.seed);
      break;
    }
    case PolicyKind::kRollout: {
      const auto base = solve_base_policy(model, point.gamma);
      traj = run_rollout(model, base, {point.gamma, point.seed}).trajectory;
      break;
    }
  }

  const auto g = discounted_returns(traj, point.gamma);
  const auto report = fairness_metrics(g);
  std::cerr << to_string(point.policy) << ": total discounted return " << report.total
            << ", welfare " << report.welfare << ", cv " << report.coefficient_of_variation
            << '\n';
  if (config.output.empty()) {
    write_trajectory_csv(std::cout, traj);
  } else {
    auto out = open_output(config.output);
    write_trajectory_csv(out, traj);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent crop planning: IQL, agent-by-agent and rollout planners"};
  app.require_subcommand(1);

  CommonOptions simulate_opts, train_opts, bench_opts;
  auto* simulate_cmd = app.add_subcommand("simulate", "Plan with one policy and dump a trajectory CSV");
  add_common(simulate_cmd, simulate_opts);
  simulate_cmd->add_option("--model", simulate_opts.model_path, "Serialized model JSON");
  auto* train_cmd = app.add_subcommand("train", "Train one policy and write policy, model and logs");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--model", train_opts.model_path, "Serialized model JSON");
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment grid and write results CSV");
  add_common(bench_cmd, bench_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*simulate_cmd) return run_simulate(simulate_opts);
    if (*train_cmd) return run_train(train_opts);
    return run_bench(bench_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
