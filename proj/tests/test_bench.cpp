#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "cropmarl/bench.hpp"
#include "cropmarl/csv.hpp"
#include "cropmarl/serialization.hpp"
#include "fixtures.hpp"

using namespace cropmarl;

namespace {

ExperimentConfig small_config(const std::string& text) {
  auto config = experiment_config_from_json(json::parse(text));
  config.iql.episodes = 50;
  config.eval_seeds = 4;
  return config;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  Rng rng(4);
  for (int k = 0; k < 2000; ++k) {
    const double x = uniform_real(rng, -1e6, 1e6) * std::pow(10.0, uniform_index(rng, 20) - 10);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(98.0) == "98");
  CHECK(format_double(0.5) == "0.5");
  CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
  CHECK(split_csv_line("a,,b") == std::vector<std::string>{"a", "", "b"});
}

TEST_CASE("model and policy JSON round-trip") {
  const Model greenhouse = build_greenhouse_model(default_greenhouse_config());
  CHECK(model_from_json(model_to_json(greenhouse)) == greenhouse);
  const Model random = build_random_mdp(7, 3, 2, {5, 3}, 4, 8);
  CHECK(model_from_json(json::parse(model_to_json(random).dump())) == random);

  const JointPolicy p = JointPolicy::random(random, 3);
  CHECK(policy_from_json(policy_to_json(p)) == p);
}

TEST_CASE("model JSON errors name the field") {
  json doc = model_to_json(fixtures::chain_model());
  doc.erase("transitions");
  CHECK_THROWS_WITH_AS(model_from_json(doc), doctest::Contains("transitions"), ConfigError);

  doc = model_to_json(fixtures::chain_model());
  doc["market"].erase("a");
  try {
    model_from_json(doc);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "market.a");
  }

  json policy = policy_to_json(JointPolicy(1, 1, 2, 2));
  policy["actions"][0][0][1] = 5;
  CHECK_THROWS_AS(policy_from_json(policy), ConfigError);
}

TEST_CASE("greenhouse config parsing") {
  const auto config = greenhouse_config_from_json(json::parse(R"({
    "horizon": 6, "n_agents": 3, "slope_coefficient": 2,
    "crops": [{"plant_window": [1, 3], "growth_duration": 2, "harvest_window": 1},
              {"growth_duration": 1, "harvest_window": 2}],
    "price": {"a": [-1, -2], "b": 40}
  })"));
  CHECK(config.crops.size() == 2);
  CHECK(config.crops[0].plant_window == std::set<int>{1, 3});
  CHECK(config.crops[1].plant_window.size() == 6);
  const Model m = build_greenhouse_model(config);
  CHECK(validate_model(m).empty());
  CHECK(m.n_agents == 3);
  CHECK(m.reward.price.slope(4, 1) == -2.0);
  CHECK(m.reward.price.intercept(6, 0) == 40.0);

  CHECK_THROWS_AS(greenhouse_config_from_json(json::parse(R"({"crops": []})")), ConfigError);
  CHECK_THROWS_AS(greenhouse_config_from_json(json::parse(
                      R"({"crops": [{"plant_window": [9], "growth_duration": 1, "harvest_window": 1}]})")),
                  ConfigError);
  CHECK_THROWS_AS(greenhouse_config_from_json(json::parse(R"({"price": {"a": 1}})")), ConfigError);
  CHECK_THROWS_AS(greenhouse_config_from_json(json::parse(R"({"slope_coefficient": 0})")), ConfigError);
}

TEST_CASE("default greenhouse market punishes crowding") {
  const auto config = default_greenhouse_config();
  const Model m = build_greenhouse_model(config);
  CHECK(validate_model(m).empty());
  CHECK(m.n_agents == 5);
  CHECK(m.reward.price.slope_coefficient == 500.0);
  for (CropId c = 0; c < m.reward.price.n_crops; ++c) {
    CHECK(price(m.reward.price, 1, c, 1) > 0.0);
    CHECK(price(m.reward.price, 1, c, 2) < 0.0);
  }
}

TEST_CASE("experiment config parsing and errors") {
  const auto config = experiment_config_from_json(json::parse(R"({
    "experiment": "discount-sweep", "gammas": [0.3, 0.6], "policies": "iql",
    "seed": 7, "aba": {"delta": 0.5}
  })"));
  CHECK(config.experiment == ExperimentKind::kDiscountSweep);
  CHECK(config.gammas == std::vector<double>{0.3, 0.6});
  CHECK(config.policies == std::vector<PolicyKind>{PolicyKind::kIql});
  CHECK(config.seeds == std::vector<std::uint64_t>{7});
  CHECK(config.agent_counts == std::vector<int>{2});
  CHECK(config.aba.delta == 0.5);
  CHECK(config.aba.init == PolicyInit::kConstant);
  CHECK(config.aba.agent_selection == AgentSelection::kRandom);

  auto field_of = [](const char* text) {
    try {
      experiment_config_from_json(json::parse(text));
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("none");
  };
  CHECK(field_of(R"({"experiment": "nope"})") == "experiment");
  CHECK(field_of(R"({"policies": ["iql", "dqn"]})") == "policies");
  CHECK(field_of(R"({"policies": []})") == "policies");
  CHECK(field_of(R"({"gamma": 1.5})") == "gamma");
  CHECK(field_of(R"({"agent_counts": [0]})") == "agent_counts");
  CHECK(field_of(R"({"seeds": "x"})") == "seeds");
  CHECK(field_of(R"({"model": {"kind": "maze"}})") == "model.kind");
  CHECK(field_of(R"({"iql": {"alpha": 2}})") == "iql");
  CHECK(field_of(R"({"aba": {"init": "zeros"}})") == "aba.init");
  CHECK(field_of("[]") == "config");
}

TEST_CASE("paper scale restores the full grid") {
  auto config = default_experiment_config(ExperimentKind::kJointReward);
  apply_paper_scale(config);
  CHECK(config.horizon == 26);
  CHECK(config.iql.episodes == 1000);
  CHECK(config.agent_counts == std::vector<int>{5, 10, 15, 20});
  CHECK(config.greenhouse.time.horizon == 26);
  auto slope = default_experiment_config(ExperimentKind::kSlopeSweep);
  apply_paper_scale(slope);
  CHECK(slope.slope_coefficients.front() == 500.0);
  CHECK(slope.slope_coefficients.back() == 1500.0);
}

TEST_CASE("grid expansion and row counts") {
  auto config = small_config(R"({"agent_counts": [2], "policies": ["iql"], "seeds": [7]})");
  const auto rows = run_experiment(config);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].agent_id == -1);
  CHECK(rows[1].agent_id == 0);
  CHECK(rows[2].agent_id == 1);
  CHECK(rows[0].seed == 7);

  auto sweep = small_config(
      R"({"experiment": "discount-sweep", "gammas": [0.3, 0.6, 0.9], "policies": ["rollout"]})");
  const auto sweep_rows = run_experiment(sweep);
  int aggregates = 0;
  for (const auto& r : sweep_rows) aggregates += r.agent_id == -1;
  CHECK(aggregates == 3);
  CHECK(sweep_rows.size() == 9);
}

TEST_CASE("aggregate rows sum the agents") {
  auto config = small_config(R"({"agent_counts": [3], "seeds": [1, 2]})");
  const auto rows = run_experiment(config);
  for (std::size_t k = 0; k < rows.size(); k += 4) {
    REQUIRE(rows[k].agent_id == -1);
    double total = 0.0, ret = 0.0;
    std::vector<double> g;
    for (int i = 1; i <= 3; ++i) {
      total += rows[k + i].total_reward;
      ret += rows[k + i].return_value;
      g.push_back(rows[k + i].return_value);
      CHECK(rows[k + i].welfare == rows[k].welfare);
    }
    CHECK(std::abs(rows[k].total_reward - total) <= 1e-9);
    CHECK(std::abs(rows[k].return_value - ret) <= 1e-9);
    CHECK(rows[k].welfare == doctest::Approx(welfare(g).product).epsilon(1e-12));
    CHECK(rows[k].runtime_ms >= 0.0);
  }
}

TEST_CASE("results CSV round-trip and determinism") {
  auto config = small_config(R"({"agent_counts": [2, 3]})");
  const auto rows = run_experiment(config);
  std::ostringstream os;
  write_results(rows, os);
  std::istringstream is(os.str());
  CHECK(read_results(is) == rows);

  std::ostringstream empty;
  write_results({}, empty);
  CHECK(empty.str() == std::string(kResultHeader) + "\n");

  auto again = run_experiment(config);
  auto strip = [](std::vector<ResultRow> r) {
    for (auto& row : r) row.runtime_ms = 0.0;
    return r;
  };
  CHECK(strip(again) == strip(rows));

  std::istringstream bad("experiment,policy\n");
  CHECK_THROWS_AS(read_results(bad), std::runtime_error);
  CHECK_THROWS_WITH_AS(write_results(rows, std::filesystem::path("/nonexistent/dir/out.csv")),
                       doctest::Contains("/nonexistent/dir/out.csv"), std::runtime_error);
}

TEST_CASE("worker pool honours MARL_THREADS") {
  ::setenv("MARL_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  auto config = small_config(R"({"agent_counts": [2, 3]})");
  const auto serial = run_experiment(config);
  ::setenv("MARL_THREADS", "4", 1);
  auto parallel = run_experiment(config);
  ::unsetenv("MARL_THREADS");
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    CHECK(serial[k].return_value == parallel[k].return_value);
    CHECK(serial[k].policy == parallel[k].policy);
  }
}
