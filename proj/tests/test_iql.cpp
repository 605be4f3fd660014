#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cropmarl/base_lp.hpp"
#include "cropmarl/iql.hpp"
#include "cropmarl/sim.hpp"
#include "fixtures.hpp"

using namespace cropmarl;
using fixtures::kChainHarvest;
using fixtures::kChainWait;
using fixtures::kMature;

namespace {

// Copies the t = 1 slice of a random MDP to every timestep.
Model stationary_random_mdp(int n_states, int n_actions, int horizon, std::uint64_t seed) {
  Model m = build_random_mdp(n_states, n_actions, 2, {horizon, 1}, 1, seed);
  const std::size_t slice = static_cast<std::size_t>(n_states) * n_actions;
  for (int t = 2; t <= horizon; ++t)
    for (std::size_t k = 0; k < slice; ++k) m.transitions[(t - 1) * slice + k] = m.transitions[k];
  auto& curve = m.reward.price;
  for (int t = 2; t <= horizon; ++t)
    for (CropId c = 0; c < curve.n_crops; ++c) {
      curve.slope(t, c) = curve.slope(1, c);
      curve.intercept(t, c) = curve.intercept(1, c);
    }
  return m;
}

}  // namespace

TEST_CASE("q_update arithmetic") {
  IqlParams p;
  p.alpha = 0.5;
  p.gamma = 0.9;
  QTable q(2, 2);
  q.at(1, 1) = 2.0;
  CHECK(q_update(q, 0, 0, 10.0, 1, p) == doctest::Approx(5.9));
  CHECK(q.at(0, 0) == doctest::Approx(5.9));

  QTable frozen(2, 2, 3.0);
  p.alpha = 0.0;
  CHECK(q_update(frozen, 0, 1, 100.0, 1, p) == 3.0);

  QTable replace(2, 2, 7.0);
  p.alpha = 1.0;
  p.gamma = 0.0;
  CHECK(q_update(replace, 0, 1, 4.5, 1, p) == 4.5);
}

TEST_CASE("terminal updates do not bootstrap") {
  IqlParams p;
  p.alpha = 1.0;
  p.gamma = 0.9;
  QTable q(2, 1, 50.0);
  CHECK(q_update(q, 0, 0, 1.0, 1, p, true) == 1.0);
}

TEST_CASE("epsilon greedy") {
  Rng rng(1);
  const std::vector<double> row{1.0, 5.0, 3.0};
  CHECK(epsilon_greedy(row, 0.0, rng) == 1);
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK(epsilon_greedy(flat, 0.0, rng) == 0);

  // Uniform within 3 sigma over 10,000 draws.
  const int draws = 10000;
  std::vector<int> freq(3, 0);
  for (int k = 0; k < draws; ++k) ++freq[epsilon_greedy(row, 1.0, rng)];
  const double p = 1.0 / 3.0;
  const double sigma = std::sqrt(draws * p * (1.0 - p));
  for (int f : freq) CHECK(std::abs(f - draws * p) <= 3.0 * sigma);
}

TEST_CASE("warm start from the base values") {
  const Model m = fixtures::chain_model(2);
  IqlParams p;
  p.gamma = 0.9;
  const auto warm = init_q_tables(m, p);
  REQUIRE(warm.size() == 1);
  CHECK(warm[0].at(kMature, kChainHarvest) == 98.0);
  CHECK(warm[0].at(kMature, kChainWait) == doctest::Approx(88.2));

  p.warm_start = false;
  for (double x : {init_q_tables(m, p)[0].at(0, 0), init_q_tables(m, p)[0].at(1, 1)}) CHECK(x == 0.0);

  p.warm_start = true;
  const auto zero = init_q_tables(fixtures::zero_model(4, 3, 3, 2, 5), p);
  for (const auto& q : zero)
    for (StateId s = 0; s < 4; ++s)
      for (ActionId a = 0; a < 3; ++a) CHECK(q.at(s, a) == 0.0);
}

TEST_CASE("parameter validation") {
  IqlParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.epsilon = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.episodes = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.gamma = 0.0;
  CHECK_THROWS_AS(train_iql(fixtures::chain_model(), p), std::invalid_argument);
}

TEST_CASE("single agent learns to harvest the chain") {
  const Model m = fixtures::chain_model(4);
  IqlParams p;
  p.episodes = 500;
  p.epsilon = 0.1;
  p.alpha = 0.2;
  p.gamma = 0.9;
  p.seed = 3;
  const auto policy = train_iql(m, p);
  const auto base = solve_base_policy(m, 0.9);
  for (int t = 1; t <= 4; ++t) {
    CHECK(policy.at(0, t, kMature) == kChainHarvest);
    CHECK(policy.at(0, t, kMature) == base.act(t, kMature));
  }
}

TEST_CASE("training is reproducible") {
  const Model m = build_random_mdp(6, 3, 2, {5, 1}, 3, 4);
  IqlParams p;
  p.episodes = 200;
  p.seed = 99;
  const auto a = train_iql_detailed(m, p);
  const auto b = train_iql_detailed(m, p);
  CHECK(a.q == b.q);
  CHECK(a.policy == b.policy);
  CHECK(a.episode_rewards == b.episode_rewards);
  CHECK(a.episode_rewards.size() == 200);
}

TEST_CASE("zero rewards extract action 0") {
  IqlParams p;
  p.episodes = 50;
  const auto policy = train_iql(fixtures::zero_model(4, 3, 3, 2, 1), p);
  for (int i = 0; i < 2; ++i)
    for (int t = 1; t <= 3; ++t)
      for (StateId s = 0; s < 4; ++s) CHECK(policy.at(i, t, s) == 0);
}

TEST_CASE("the extracted policy ignores time") {
  const Model m = build_random_mdp(5, 3, 2, {6, 1}, 2, 12);
  IqlParams p;
  p.episodes = 100;
  const auto policy = train_iql(m, p);
  for (int i = 0; i < 2; ++i)
    for (StateId s = 0; s < 5; ++s)
      for (int t = 2; t <= 6; ++t) CHECK(policy.at(i, t, s) == policy.at(i, 1, s));
}

TEST_CASE("single agent return approaches the optimum on small stationary models") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Model m = stationary_random_mdp(6, 3, 6, seed);
    IqlParams p;
    p.episodes = 2000;
    p.alpha = 0.1;
    p.epsilon = 0.1;
    p.gamma = 0.9;
    p.seed = seed;
    const auto policy = train_iql(m, p);
    const auto values = solve_value_function(m, 0.9);
    double learned = 0.0, optimal = 0.0;
    for (StateId s = 0; s < m.n_states; ++s) {
      const std::vector<StateId> start{s};
      learned += discounted_returns(simulate_from(m, policy, start), 0.9)[0] / m.n_states;
      optimal += values.at(1, s) / m.n_states;
    }
    CAPTURE(seed);
    CHECK(learned >= 0.95 * optimal);
  }
}

TEST_CASE("Q-table and log CSV layouts") {
  std::vector<QTable> q{QTable(1, 2, 0.5)};
  std::ostringstream qs;
  write_q_tables_csv(qs, q);
  CHECK(qs.str() == "agent,state,action,q_value\n0,0,0,0.5\n0,0,1,0.5\n");
  std::ostringstream ls;
  const std::vector<double> log{3.0, -1.5};
  write_iql_log_csv(ls, log);
  CHECK(ls.str() == "episode,total_reward\n1,3\n2,-1.5\n");
}
