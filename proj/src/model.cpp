#include "cropmarl/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cropmarl/rng.hpp"

namespace cropmarl {

namespace {

[[noreturn]] void out_of_range(const char* what, long value, long limit) {
  std::ostringstream msg;
  msg << what << " index " << value << " out of range (limit " << limit << ")";
  throw std::out_of_range(msg.str());
}

}  // namespace

void Model::reset_transitions() {
  transitions.assign(static_cast<std::size_t>(time.horizon) * n_states * n_actions, 0);
  for (int t = 1; t <= time.horizon; ++t)
    for (StateId s = 0; s < n_states; ++s)
      for (ActionId a = 0; a < n_actions; ++a) transitions[transition_index(t, s, a)] = s;
}

void Model::set_transition(int t, StateId s, ActionId a, StateId next) {
  if (t < 1 || t > time.horizon) out_of_range("timestep", t, time.horizon + 1);
  if (s < 0 || s >= n_states) out_of_range("state", s, n_states);
  if (a < 0 || a >= n_actions) out_of_range("action", a, n_actions);
  if (next < 0 || next >= n_states) out_of_range("successor state", next, n_states);
  transitions[transition_index(t, s, a)] = next;
}

double Model::single_agent_reward(int t, StateId s, ActionId a) const {
  const CropId c = reward.harvested_crop(s, a);
  return c == kNoCrop ? 0.0 : price_unchecked(reward.price, t, c, 1);
}

StateId apply_transition(const Model& model, int t, StateId s, ActionId a) {
  if (t < 1 || t > model.horizon()) out_of_range("timestep", t, model.horizon() + 1);
  if (s < 0 || s >= model.n_states) out_of_range("state", s, model.n_states);
  if (a < 0 || a >= model.n_actions) out_of_range("action", a, model.n_actions);
  return model.transitions[model.transition_index(t, s, a)];
}

std::vector<std::string> validate_model(const Model& model) {
  std::vector<std::string> issues;
  auto report = [&issues](auto&&... parts) {
    std::ostringstream msg;
    (msg << ... << parts);
    issues.push_back(msg.str());
  };

  if (model.n_agents < 1) report("n_agents must be >= 1, got ", model.n_agents);
  if (model.time.horizon < 1) report("horizon must be >= 1, got ", model.time.horizon);
  if (model.time.days_per_step < 1)
    report("days_per_step must be >= 1, got ", model.time.days_per_step);
  if (model.n_states < 1) report("n_states must be >= 1, got ", model.n_states);
  if (model.n_actions < 1) report("n_actions must be >= 1, got ", model.n_actions);
  if (!issues.empty()) return issues;

  if (!model.state_labels.empty() &&
      model.state_labels.size() != static_cast<std::size_t>(model.n_states))
    report("state_labels has ", model.state_labels.size(), " entries, expected ", model.n_states);
  if (!model.action_labels.empty() &&
      model.action_labels.size() != static_cast<std::size_t>(model.n_actions))
    report("action_labels has ", model.action_labels.size(), " entries, expected ",
           model.n_actions);

  const std::size_t expected =
      static_cast<std::size_t>(model.time.horizon) * model.n_states * model.n_actions;
  if (model.transitions.size() != expected) {
    report("transition table has ", model.transitions.size(), " entries, expected ", expected);
  } else {
    for (int t = 1; t <= model.time.horizon; ++t)
      for (StateId s = 0; s < model.n_states; ++s)
        for (ActionId a = 0; a < model.n_actions; ++a) {
          const StateId next = model.transitions[model.transition_index(t, s, a)];
          if (next < 0 || next >= model.n_states)
            report("transition (t=", t, ", s=", s, ", a=", a, ") points to invalid state ", next);
        }
  }

  if (model.initials.size() != static_cast<std::size_t>(model.n_agents)) {
    report("initials has ", model.initials.size(), " rows, expected ", model.n_agents);
  } else {
    for (int i = 0; i < model.n_agents; ++i) {
      const auto& row = model.initials[i];
      if (row.size() != static_cast<std::size_t>(model.n_states)) {
        report("initial distribution of agent ", i, " has length ", row.size(), ", expected ",
               model.n_states);
        continue;
      }
      double sum = 0.0;
      bool negative = false;
      for (double p : row) {
        negative = negative || !(p >= 0.0);
        sum += p;
      }
      if (negative) report("initial distribution of agent ", i, " has a negative entry");
      if (!(std::abs(sum - 1.0) <= 1e-12))
        report("initial distribution of agent ", i, " sums to ", sum, ", expected 1");
    }
  }

  const auto& market = model.reward;
  const auto& curve = market.price;
  if (market.harvest_action < 0 || market.harvest_action >= model.n_actions)
    report("harvest action ", market.harvest_action, " out of range");
  if (market.harvestable.size() != static_cast<std::size_t>(model.n_states))
    report("harvestable map has ", market.harvestable.size(), " entries, expected ",
           model.n_states);
  if (curve.n_crops < 1) report("market has no crops");
  if (curve.horizon < model.time.horizon)
    report("price curve covers ", curve.horizon, " timesteps, model horizon is ",
           model.time.horizon);
  const std::size_t cells = static_cast<std::size_t>(std::max(curve.horizon, 0)) *
                            std::max(curve.n_crops, 0);
  if (curve.a.size() != cells || curve.b.size() != cells) {
    report("price tables have ", curve.a.size(), "/", curve.b.size(), " entries, expected ",
           cells);
  } else {
    for (int t = 1; t <= curve.horizon; ++t)
      for (CropId c = 0; c < curve.n_crops; ++c) {
        if (!(curve.slope(t, c) < 0.0))
          report("price slope a(t=", t, ", c=", c, ") must be < 0, got ", curve.slope(t, c));
        if (!(curve.intercept(t, c) > 0.0))
          report("price intercept b(t=", t, ", c=", c, ") must be > 0, got ",
                 curve.intercept(t, c));
      }
  }
  if (!(curve.slope_coefficient > 0.0))
    report("slope_coefficient must be > 0, got ", curve.slope_coefficient);
  for (std::size_t s = 0; s < market.harvestable.size(); ++s) {
    const CropId c = market.harvestable[s];
    if (c != kNoCrop && (c < 0 || c >= curve.n_crops))
      report("state ", s, " sells unknown crop ", c);
  }
  return issues;
}

JointPolicy::JointPolicy(int n_agents, int horizon, int n_states, int n_actions, ActionId fill)
    : n_agents_(n_agents), horizon_(horizon), n_states_(n_states), n_actions_(n_actions),
      table_(static_cast<std::size_t>(n_agents) * horizon * n_states, fill) {
  if (n_agents < 1 || horizon < 1 || n_states < 1 || n_actions < 1)
    throw std::invalid_argument("JointPolicy dimensions must be positive");
  if (fill < 0 || fill >= n_actions) out_of_range("action", fill, n_actions);
}

JointPolicy JointPolicy::constant(const Model& model, ActionId action) {
  return JointPolicy(model.n_agents, model.horizon(), model.n_states, model.n_actions, action);
}

JointPolicy JointPolicy::random(const Model& model, std::uint64_t seed) {
  JointPolicy policy(model.n_agents, model.horizon(), model.n_states, model.n_actions);
  Rng rng(seed);
  for (auto& a : policy.table_) a = uniform_index(rng, model.n_actions);
  return policy;
}

void JointPolicy::check(int agent, int t, StateId s) const {
  if (agent < 0 || agent >= n_agents_) out_of_range("agent", agent, n_agents_);
  if (t < 1 || t > horizon_) out_of_range("timestep", t, horizon_ + 1);
  if (s < 0 || s >= n_states_) out_of_range("state", s, n_states_);
}

ActionId JointPolicy::at(int agent, int t, StateId s) const {
  check(agent, t, s);
  return table_[index(agent, t, s)];
}

void JointPolicy::set(int agent, int t, StateId s, ActionId a) {
  check(agent, t, s);
  if (a < 0 || a >= n_actions_) out_of_range("action", a, n_actions_);
  table_[index(agent, t, s)] = a;
}

ActionId policy_lookup(const JointPolicy& policy, int agent, int t, StateId s) {
  return policy.at(agent, t, s);
}

}  // namespace cropmarl
