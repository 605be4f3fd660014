#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cropmarl/greenhouse.hpp"
#include "cropmarl/market.hpp"
#include "cropmarl/serialization.hpp"
#include "fixtures.hpp"

using namespace cropmarl;

TEST_CASE("price is a line in the number of sellers") {
  const PriceCurve unit(1, 1, -2.0, 100.0, 1.0);
  CHECK(price(unit, 1, 0, 1) == 98.0);
  CHECK(price(unit, 1, 0, 2) == 96.0);
  const PriceCurve steep(1, 1, -2.0, 100.0, 500.0);
  CHECK(price(steep, 1, 0, 1) == -900.0);
}

TEST_CASE("price rejects empty markets and bad indices") {
  const PriceCurve curve(3, 2, -1.0, 10.0, 1.0);
  CHECK_THROWS_AS(price(curve, 1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(price(curve, 0, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(price(curve, 4, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(price(curve, 1, 2, 1), std::out_of_range);
}

TEST_CASE("price strictly falls with supply") {
  Rng rng(11);
  for (int k = 0; k < 500; ++k) {
    const double a = -uniform_real(rng, 0.01, 5.0);
    const double b = uniform_real(rng, 1.0, 200.0);
    const double slope = uniform_real(rng, 0.1, 1500.0);
    const PriceCurve curve(1, 1, a, b, slope);
    for (int d = 1; d < 20; ++d) CHECK(price(curve, 1, 0, d + 1) < price(curve, 1, 0, d));
  }
}

TEST_CASE("joint reward examples") {
  const Model m = fixtures::chain_model(2, 2);
  using fixtures::kChainHarvest;
  using fixtures::kChainWait;
  using fixtures::kChainEmpty;
  using fixtures::kMature;

  SUBCASE("two valid harvesters share the market") {
    const std::vector<StateId> s{kMature, kMature};
    const std::vector<ActionId> a{kChainHarvest, kChainHarvest};
    CHECK(joint_reward(m, 1, s, a) == std::vector<double>{96.0, 96.0});
  }
  SUBCASE("a waiting agent earns nothing") {
    const std::vector<StateId> s{kMature, kMature};
    const std::vector<ActionId> a{kChainHarvest, kChainWait};
    CHECK(joint_reward(m, 1, s, a) == std::vector<double>{98.0, 0.0});
  }
  SUBCASE("an invalid harvest neither earns nor counts") {
    const std::vector<StateId> s{kChainEmpty, kMature};
    const std::vector<ActionId> a{kChainHarvest, kChainHarvest};
    CHECK(joint_reward(m, 1, s, a) == std::vector<double>{0.0, 98.0});
    CHECK(harvest_counts(m, s, a) == std::vector<int>{1});
  }
  SUBCASE("length and range errors") {
    const std::vector<StateId> s{kMature};
    const std::vector<ActionId> a{kChainHarvest};
    CHECK_THROWS_AS(joint_reward(m, 1, s, a), std::invalid_argument);
    const std::vector<StateId> s2{kMature, 7};
    const std::vector<ActionId> a2{0, 0};
    CHECK_THROWS_AS(joint_reward(m, 1, s2, a2), std::out_of_range);
    const std::vector<StateId> s3{kMature, kMature};
    CHECK_THROWS_AS(joint_reward(m, 3, s3, a2), std::out_of_range);
  }
}

TEST_CASE("joint reward properties on random inputs") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + uniform_index(rng, 6);
    const Model m = build_random_mdp(6, 3, 3, {4, 1}, n, 1000 + trial, 3.0);
    const int t = 1 + uniform_index(rng, 4);
    std::vector<StateId> s(n);
    std::vector<ActionId> a(n);
    for (int i = 0; i < n; ++i) {
      s[i] = uniform_index(rng, m.n_states);
      a[i] = uniform_index(rng, m.n_actions);
    }
    const auto r = joint_reward(m, t, s, a);
    const auto counts = harvest_counts(m, s, a);

    int valid = 0;
    for (int i = 0; i < n; ++i) {
      const CropId c = m.reward.harvested_crop(s[i], a[i]);
      if (c == kNoCrop) {
        CHECK(r[i] == 0.0);
      } else {
        ++valid;
        CHECK(r[i] == price(m.reward.price, t, c, counts[c]));
      }
    }
    CHECK(std::accumulate(counts.begin(), counts.end(), 0) == valid);

    // Reversing the agents reverses the rewards.
    std::vector<StateId> rs(s.rbegin(), s.rend());
    std::vector<ActionId> ra(a.rbegin(), a.rend());
    auto rr = joint_reward(m, t, rs, ra);
    std::reverse(rr.begin(), rr.end());
    CHECK(rr == r);
  }
}

TEST_CASE("greenhouse state space and transitions") {
  CropSpec crop;
  crop.plant_window = {1, 2};
  crop.growth_duration = 2;
  crop.harvest_window = 2;
  const std::vector<CropSpec> crops{crop};
  const Model m =
      build_greenhouse_model(crops, PriceCurve(4, 1, -1.0, 50.0, 1.0), {4, 7}, 2, {});
  CHECK(m.n_states == 4);
  CHECK(m.n_actions == 3);
  CHECK(validate_model(m).empty());

  const StateId growing = growing_state(crops, 0, 1);
  const StateId mature0 = mature_state(crops, 0, 0);
  const StateId mature1 = mature_state(crops, 0, 1);

  CHECK(apply_transition(m, 1, kEmpty, kWait) == kEmpty);
  CHECK(apply_transition(m, 1, kEmpty, plant_action(0)) == growing);
  CHECK(apply_transition(m, 3, kEmpty, plant_action(0)) == kEmpty);
  CHECK(apply_transition(m, 3, growing, kWait) == mature0);
  CHECK(apply_transition(m, 3, growing, kHarvest) == mature0);
  CHECK(apply_transition(m, 2, mature0, kWait) == mature1);
  CHECK(apply_transition(m, 2, mature1, kWait) == kEmpty);
  CHECK(apply_transition(m, 1, mature0, kHarvest) == kEmpty);
  CHECK(apply_transition(m, 1, mature1, plant_action(0)) == kEmpty);
  CHECK(m.reward.harvestable[mature0] == 0);
  CHECK(m.reward.harvestable[growing] == kNoCrop);
  CHECK(m.reward.harvestable[kEmpty] == kNoCrop);
}

TEST_CASE("growing ages by one per step") {
  CropSpec crop;
  crop.plant_window = {1};
  crop.growth_duration = 4;
  crop.harvest_window = 1;
  const std::vector<CropSpec> crops{crop};
  const Model m = build_greenhouse_model(crops, PriceCurve(5, 1, -1.0, 50.0, 1.0), {5, 1}, 1, {});
  CHECK(apply_transition(m, 3, growing_state(crops, 0, 1), kWait) == growing_state(crops, 0, 2));
  CHECK(apply_transition(m, 3, growing_state(crops, 0, 3), kWait) == mature_state(crops, 0, 0));
}

TEST_CASE("greenhouse builder errors") {
  CHECK_THROWS_AS(build_greenhouse_model({}, PriceCurve(2, 1, -1.0, 1.0, 1.0), {2, 1}, 1, {}),
                  std::invalid_argument);
  CropSpec bad;
  bad.plant_window = {1};
  bad.growth_duration = 0;
  CHECK_THROWS_AS(build_greenhouse_model({bad}, PriceCurve(2, 1, -1.0, 1.0, 1.0), {2, 1}, 1, {}),
                  std::invalid_argument);
}

TEST_CASE("random MDP builder") {
  const Model a = build_random_mdp(10, 3, 2, {8, 1}, 3, 42);
  const Model b = build_random_mdp(10, 3, 2, {8, 1}, 3, 42);
  const Model c = build_random_mdp(10, 3, 2, {8, 1}, 3, 43);
  CHECK(model_to_json(a).dump() == model_to_json(b).dump());
  CHECK(a.transitions != c.transitions);
  CHECK(validate_model(a).empty());
  for (double x : a.reward.price.a) CHECK((x >= -5.0 && x <= -1.0));
  for (double x : a.reward.price.b) CHECK((x >= 50.0 && x <= 150.0));

  const Model one = build_random_mdp(1, 1, 1, {3, 1}, 2, 9);
  for (StateId next : one.transitions) CHECK(next == 0);

  CHECK_THROWS_AS(build_random_mdp(0, 1, 1, {3, 1}, 1, 1), std::invalid_argument);
}

TEST_CASE("harvestable fraction of random MDPs is near 0.3") {
  int harvestable = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Model m = build_random_mdp(50, 2, 3, {1, 1}, 1, seed);
    for (CropId c : m.reward.harvestable) {
      harvestable += c != kNoCrop;
      ++total;
    }
  }
  // 10,000 Bernoulli(0.3) draws: sigma is about 0.0046.
  CHECK(static_cast<double>(harvestable) / total == doctest::Approx(0.3).epsilon(0.05));
}
