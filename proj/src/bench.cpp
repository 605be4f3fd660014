#include "cropmarl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cropmarl/base_lp.hpp"
#include "cropmarl/csv.hpp"
#include "cropmarl/greenhouse.hpp"
#include "cropmarl/rng.hpp"
#include "cropmarl/rollout.hpp"
#include "cropmarl/sim.hpp"

namespace cropmarl {

namespace {

constexpr std::uint64_t kTrainStream = 100;
constexpr std::uint64_t kModelStream = 300;
constexpr std::uint64_t kEvalStream = 1000;

ExperimentKind parse_experiment(const std::string& name) {
  if (name == "joint-reward") return ExperimentKind::kJointReward;
  if (name == "runtime") return ExperimentKind::kRuntime;
  if (name == "slope-sweep") return ExperimentKind::kSlopeSweep;
  if (name == "discount-sweep") return ExperimentKind::kDiscountSweep;
  if (name == "simulate") return ExperimentKind::kSimulate;
  throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

template <typename T>
std::vector<T> scalar_or_list(const json& doc, const char* list_field, const char* scalar_field,
                              std::vector<T> fallback) {
  try {
    if (doc.contains(list_field)) {
      const auto& v = doc.at(list_field);
      return v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
    }
    if (scalar_field && doc.contains(scalar_field)) {
      const auto& v = doc.at(scalar_field);
      return v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
    }
  } catch (const json::exception& e) {
    throw ConfigError(list_field, e.what());
  }
  return fallback;
}

template <typename T>
T field_or(const json& doc, const char* field, T fallback) {
  if (!doc.contains(field)) return fallback;
  try {
    return doc.at(field).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

std::vector<std::uint64_t> evaluation_seeds(const ExperimentConfig& config, std::uint64_t seed) {
  std::vector<std::uint64_t> seeds(config.eval_seeds);
  for (int k = 0; k < config.eval_seeds; ++k) seeds[k] = mix_seed(seed, kEvalStream + k);
  return seeds;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kJointReward: return "joint-reward";
    case ExperimentKind::kRuntime: return "runtime";
    case ExperimentKind::kSlopeSweep: return "slope-sweep";
    case ExperimentKind::kDiscountSweep: return "discount-sweep";
    case ExperimentKind::kSimulate: return "simulate";
  }
  return "unknown";
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kIql: return "iql";
    case PolicyKind::kAba: return "aba";
    case PolicyKind::kRollout: return "rollout";
  }
  return "unknown";
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "iql") return PolicyKind::kIql;
  if (name == "aba") return PolicyKind::kAba;
  if (name == "rollout") return PolicyKind::kRollout;
  throw ConfigError("policies", "unknown policy '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("policies", "must be nonempty");
  if (seeds.empty()) throw ConfigError("seeds", "must be nonempty");
  if (agent_counts.empty()) throw ConfigError("agent_counts", "must be nonempty");
  if (gammas.empty()) throw ConfigError("gamma", "must be nonempty");
  if (slope_coefficients.empty()) throw ConfigError("slope_coefficients", "must be nonempty");
  for (int n : agent_counts)
    if (n < 1) throw ConfigError("agent_counts", "every agent count must be >= 1");
  for (double g : gammas)
    if (!(g > 0.0 && g <= 1.0)) throw ConfigError("gamma", "every discount must lie in (0, 1]");
  for (double s : slope_coefficients)
    if (!(s > 0.0)) throw ConfigError("slope_coefficients", "every slope coefficient must be > 0");
  if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
  if (days_per_step < 1) throw ConfigError("days_per_step", "must be >= 1");
  if (eval_seeds < 1) throw ConfigError("eval_seeds", "must be >= 1");
  if (model == ModelKind::kRandomMdp &&
      (random_mdp.n_states < 1 || random_mdp.n_actions < 1 || random_mdp.n_crops < 1))
    throw ConfigError("model", "random-mdp sizes must be >= 1");
  try {
    iql.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("iql", e.what());
  }
  try {
    aba.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("aba", e.what());
  }
}

ExperimentConfig default_experiment_config(ExperimentKind kind) {
  ExperimentConfig config;
  config.experiment = kind;
  switch (kind) {
    case ExperimentKind::kRuntime:
      config.model = ModelKind::kRandomMdp;
      config.horizon = 8;
      config.agent_counts = {5, 10, 15, 20};
      break;
    case ExperimentKind::kSlopeSweep:
      config.agent_counts = {2};
      config.slope_coefficients = {500.0, 750.0, 1000.0, 1250.0, 1500.0};
      break;
    case ExperimentKind::kDiscountSweep:
      config.agent_counts = {2};
      config.gammas = {0.3, 0.5, 0.7, 0.9};
      break;
    default:
      break;
  }
  return config;
}

ExperimentConfig experiment_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
  const auto kind = parse_experiment(field_or<std::string>(doc, "experiment", "joint-reward"));
  ExperimentConfig config = default_experiment_config(kind);

  if (doc.contains("policies")) {
    config.policies.clear();
    for (const auto& name : scalar_or_list<std::string>(doc, "policies", nullptr, {}))
      config.policies.push_back(parse_policy(name));
  }
  config.agent_counts = scalar_or_list<int>(doc, "agent_counts", "n_agents", config.agent_counts);
  config.gammas = scalar_or_list<double>(doc, "gammas", "gamma", config.gammas);
  config.slope_coefficients =
      scalar_or_list<double>(doc, "slope_coefficients", "slope_coefficient", config.slope_coefficients);
  config.horizon = field_or<int>(doc, "horizon", config.horizon);
  config.days_per_step = field_or<int>(doc, "days_per_step", config.days_per_step);
  config.seeds = scalar_or_list<std::uint64_t>(doc, "seeds", "seed", config.seeds);
  config.eval_seeds = field_or<int>(doc, "eval_seeds", config.eval_seeds);
  config.output = field_or<std::string>(doc, "output", config.output);

  if (doc.contains("model")) {
    const auto& model = doc.at("model");
    const auto kind_name = field_or<std::string>(model, "kind", "greenhouse");
    if (kind_name == "greenhouse") {
      config.model = ModelKind::kGreenhouse;
    } else if (kind_name == "random-mdp") {
      config.model = ModelKind::kRandomMdp;
      config.random_mdp.n_states = field_or<int>(model, "n_states", config.random_mdp.n_states);
      config.random_mdp.n_actions = field_or<int>(model, "n_actions", config.random_mdp.n_actions);
      config.random_mdp.n_crops = field_or<int>(model, "n_crops", config.random_mdp.n_crops);
    } else {
      throw ConfigError("model.kind", "unknown model kind '" + kind_name + "'");
    }
  }
  if (config.model == ModelKind::kGreenhouse) {
    json greenhouse = doc.contains("model") ? doc.at("model") : json::object();
    greenhouse.erase("kind");
    if (!greenhouse.contains("horizon")) greenhouse["horizon"] = config.horizon;
    config.greenhouse = greenhouse_config_from_json(greenhouse);
    config.horizon = config.greenhouse.time.horizon;
  }

  if (doc.contains("iql")) {
    const auto& iql = doc.at("iql");
    config.iql.alpha = field_or<double>(iql, "alpha", config.iql.alpha);
    config.iql.epsilon = field_or<double>(iql, "epsilon", config.iql.epsilon);
    config.iql.episodes = field_or<int>(iql, "episodes", config.iql.episodes);
    config.iql.warm_start = field_or<bool>(iql, "warm_start", config.iql.warm_start);
  }
  if (doc.contains("aba")) {
    const auto& aba = doc.at("aba");
    config.aba.max_iterations = field_or<int>(aba, "max_iterations", config.aba.max_iterations);
    config.aba.delta = field_or<double>(aba, "delta", config.aba.delta);
    const auto selection = field_or<std::string>(
        aba, "agent_selection",
        config.aba.agent_selection == AgentSelection::kCyclic ? "cyclic" : "random");
    if (selection != "random" && selection != "cyclic")
      throw ConfigError("aba.agent_selection", "expected 'random' or 'cyclic'");
    config.aba.agent_selection =
        selection == "cyclic" ? AgentSelection::kCyclic : AgentSelection::kRandom;
    const auto init = field_or<std::string>(
        aba, "init", config.aba.init == PolicyInit::kConstant ? "constant" : "random");
    if (init != "random" && init != "constant")
      throw ConfigError("aba.init", "expected 'random' or 'constant'");
    config.aba.init = init == "constant" ? PolicyInit::kConstant : PolicyInit::kRandom;
  }
  config.validate();
  return config;
}

void apply_paper_scale(ExperimentConfig& config) {
  config.horizon = 26;
  config.days_per_step = 14;
  config.iql.episodes = 1000;
  switch (config.experiment) {
    case ExperimentKind::kJointReward:
    case ExperimentKind::kRuntime:
      config.agent_counts = {5, 10, 15, 20};
      break;
    case ExperimentKind::kSlopeSweep:
      config.agent_counts = {2};
      config.slope_coefficients = {500.0, 750.0, 1000.0, 1250.0, 1500.0};
      break;
    case ExperimentKind::kDiscountSweep:
      config.agent_counts = {2};
      config.gammas = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
      break;
    case ExperimentKind::kSimulate:
      break;
  }
  if (config.model == ModelKind::kGreenhouse) {
    auto resized = default_greenhouse_config(config.horizon);
    resized.price_a = config.greenhouse.price_a;
    resized.price_b = config.greenhouse.price_b;
    resized.initials = config.greenhouse.initials;
    if (config.greenhouse.crops.size() == resized.crops.size()) config.greenhouse = resized;
    config.greenhouse.time = {config.horizon, config.days_per_step};
  }
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
  std::vector<GridPoint> grid;
  for (double slope : config.slope_coefficients)
    for (double gamma : config.gammas)
      for (int n : config.agent_counts)
        for (auto policy : config.policies)
          for (auto seed : config.seeds) grid.push_back({policy, n, gamma, slope, seed});
  return grid;
}

Model build_experiment_model(const ExperimentConfig& config, const GridPoint& point) {
  const TimeGrid time{config.horizon, config.days_per_step};
  if (config.model == ModelKind::kRandomMdp)
    return build_random_mdp(config.random_mdp.n_states, config.random_mdp.n_actions,
                            config.random_mdp.n_crops, time, point.n_agents,
                            mix_seed(point.seed, kModelStream), point.slope_coefficient);
  GreenhouseConfig greenhouse = config.greenhouse;
  greenhouse.n_agents = point.n_agents;
  greenhouse.slope_coefficient = point.slope_coefficient;
  greenhouse.time = time;
  return build_greenhouse_model(greenhouse);
}

std::vector<ResultRow> run_grid_point(const ExperimentConfig& config, const GridPoint& point) {
  const Model model = build_experiment_model(config, point);
  const auto eval = evaluation_seeds(config, point.seed);
  const std::uint64_t train_seed = mix_seed(point.seed, kTrainStream);

  PolicyEvaluation result{ReturnsVector(model.n_agents, 0.0), ReturnsVector(model.n_agents, 0.0)};
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&start] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };
  double runtime_ms = 0.0;
  switch (point.policy) {
    case PolicyKind::kIql: {
      IqlParams params = config.iql;
      params.gamma = point.gamma;
      params.seed = train_seed;
      const auto policy = train_iql(model, params);
      runtime_ms = elapsed_ms();
      result = evaluate_policy(model, policy, eval, point.gamma);
      break;
    }
    case PolicyKind::kAba: {
      AbaParams params = config.aba;
      params.gamma = point.gamma;
      params.seed = train_seed;
      const auto policy = train_aba(model, params);
      runtime_ms = elapsed_ms();
      result = evaluate_policy(model, policy, eval, point.gamma);
      break;
    }
    case PolicyKind::kRollout: {
      // Rollout plans online, so every evaluation episode is planning time.
      const auto base = solve_base_policy(model, point.gamma);
      for (auto seed : eval) {
        const auto run = run_rollout(model, base, {point.gamma, seed});
        const auto g = discounted_returns(run.trajectory, point.gamma);
        const auto total = discounted_returns(run.trajectory, 1.0);
        for (int i = 0; i < model.n_agents; ++i) {
          result.discounted[i] += g[i];
          result.undiscounted[i] += total[i];
        }
      }
      for (int i = 0; i < model.n_agents; ++i) {
        result.discounted[i] /= static_cast<double>(eval.size());
        result.undiscounted[i] /= static_cast<double>(eval.size());
      }
      runtime_ms = elapsed_ms();
      break;
    }
  }

  const double u = welfare(result.discounted).product;
  ResultRow base_row;
  base_row.experiment = to_string(config.experiment);
  base_row.policy = to_string(point.policy);
  base_row.n_agents = point.n_agents;
  base_row.gamma = point.gamma;
  base_row.slope_coefficient = point.slope_coefficient;
  base_row.seed = point.seed;
  base_row.welfare = u;
  base_row.runtime_ms = runtime_ms;

  std::vector<ResultRow> rows;
  ResultRow aggregate = base_row;
  aggregate.agent_id = -1;
  aggregate.return_value = 0.0;
  aggregate.total_reward = 0.0;
  for (int i = 0; i < model.n_agents; ++i) {
    aggregate.return_value += result.discounted[i];
    aggregate.total_reward += result.undiscounted[i];
  }
  rows.push_back(aggregate);
  for (int i = 0; i < model.n_agents; ++i) {
    ResultRow row = base_row;
    row.agent_id = i;
    row.return_value = result.discounted[i];
    row.total_reward = result.undiscounted[i];
    rows.push_back(row);
  }
  return rows;
}

int worker_count() {
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("MARL_THREADS")) {
    const int value = std::atoi(cap);
    if (value >= 1) workers = std::min(workers, value);
  }
  return workers;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto grid = expand_grid(config);
  std::vector<std::vector<ResultRow>> slots(grid.size());

  // Timing runs share no worker so that measurements do not contend.
  const int workers = config.experiment == ExperimentKind::kRuntime
                          ? 1
                          : std::min<int>(worker_count(), static_cast<int>(grid.size()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < grid.size(); ++k) slots[k] = run_grid_point(config, grid[k]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
          try {
            slots[k] = run_grid_point(config, grid[k]);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& thread : pool) thread.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<ResultRow> rows;
  for (auto& slot : slots) rows.insert(rows.end(), slot.begin(), slot.end());
  return rows;
}

void write_results(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kResultHeader << '\n';
  for (const auto& r : rows)
    os << r.experiment << ',' << r.policy << ',' << r.n_agents << ',' << format_double(r.gamma)
       << ',' << format_double(r.slope_coefficient) << ',' << r.seed << ',' << r.agent_id << ','
       << format_double(r.return_value) << ',' << format_double(r.total_reward) << ','
       << format_double(r.welfare) << ',' << format_double(r.runtime_ms) << '\n';
}

void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_results(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing results to '" + path.string() + "'");
}

std::vector<ResultRow> read_results(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("results file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultHeader) throw std::runtime_error("unexpected results header: " + line);
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) throw std::runtime_error("malformed results row: " + line);
    ResultRow r;
    r.experiment = f[0];
    r.policy = f[1];
    r.n_agents = std::stoi(f[2]);
    r.gamma = parse_double(f[3]);
    r.slope_coefficient = parse_double(f[4]);
    r.seed = std::stoull(f[5]);
    r.agent_id = std::stoi(f[6]);
    r.return_value = parse_double(f[7]);
    r.total_reward = parse_double(f[8]);
    r.welfare = parse_double(f[9]);
    r.runtime_ms = parse_double(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return read_results(in);
}

}  // namespace cropmarl
