// Copyright 2026 The cetest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cetest/agents.h"

#include <cmath>
#include <utility>

#include "cetest/error.h"

namespace cetest {

FictitiousPlayLearner::FictitiousPlayLearner(const Game& game, int agent)
    : game_(&game), agent_(agent) {
  if (agent < 0 || agent >= game.num_agents()) {
    throw InvalidInputError("agent index out of range");
  }
  Reset();
}

void FictitiousPlayLearner::Reset() {
  counts_.assign(game_->num_agents(), {});
  for (int j = 0; j < game_->num_agents(); ++j) {
    counts_[j].assign(game_->action_count(j), 0);
  }
  observed_ = 0;
}

void FictitiousPlayLearner::Observe(JointIndex joint_action) {
  const ActionSpace& space = game_->space();
  for (int j = 0; j < game_->num_agents(); ++j) {
    ++counts_[j][space.ActionOf(joint_action, j)];
  }
  ++observed_;
}

MixedStrategy FictitiousPlayLearner::NextStrategy() const {
  const int k = game_->action_count(agent_);
  if (observed_ == 0) return MixedStrategy::Uniform(k);
  const ActionSpace& space = game_->space();
  const double n = static_cast<double>(observed_);
  std::vector<double> value(k, 0.0);
  for (JointIndex a = 0; a < space.size(); ++a) {
    double weight = 1.0;
    for (int j = 0; j < game_->num_agents() && weight > 0.0; ++j) {
      if (j == agent_) continue;
      weight *= static_cast<double>(counts_[j][space.ActionOf(a, j)]) / n;
    }
    if (weight == 0.0) continue;
    value[space.ActionOf(a, agent_)] += weight * game_->utility(a, agent_);
  }
  int best = 0;
  for (int action = 1; action < k; ++action) {
    if (value[action] > value[best] + 1e-12) best = action;
  }
  return MixedStrategy::Pure(k, best);
}

TriggerLearner::TriggerLearner(const Game& game, int agent, int action,
                               int opponent, int opponent_action,
                               int switch_action)
    : game_(&game),
      action_count_(game.action_count(agent)),
      action_(action),
      opponent_(opponent),
      opponent_action_(opponent_action),
      switch_action_(switch_action) {
  if (action < 0 || action >= action_count_ || switch_action < 0 ||
      switch_action >= action_count_) {
    throw InvalidInputError("trigger action out of range");
  }
  if (opponent < 0 || opponent >= game.num_agents() || opponent == agent) {
    throw InvalidInputError("trigger opponent must be another agent");
  }
  if (opponent_action < 0 || opponent_action >= game.action_count(opponent)) {
    throw InvalidInputError("trigger opponent action out of range");
  }
}

void TriggerLearner::Observe(JointIndex joint_action) {
  if (game_->space().ActionOf(joint_action, opponent_) == opponent_action_) {
    triggered_ = true;
  }
}

MixedStrategy TriggerLearner::NextStrategy() const {
  return MixedStrategy::Pure(action_count_,
                             triggered_ ? switch_action_ : action_);
}

namespace {

int IntParam(const LearnerSpec& spec, const std::string& key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) {
    throw InvalidInputError("learner '" + spec.name + "' needs parameter '" +
                            key + "'");
  }
  const double v = it->second;
  if (v != std::floor(v)) {
    throw InvalidInputError("learner parameter '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

std::unique_ptr<Learner> MakeLearner(const LearnerSpec& spec, const Game& game,
                                     int agent) {
  if (agent < 0 || agent >= game.num_agents()) {
    throw InvalidInputError("agent index out of range");
  }
  if (spec.name == "uniform") {
    return std::make_unique<UniformLearner>(game.action_count(agent));
  }
  if (spec.name == "fictitious-play") {
    return std::make_unique<FictitiousPlayLearner>(game, agent);
  }
  if (spec.name == "trigger") {
    return std::make_unique<TriggerLearner>(
        game, agent, IntParam(spec, "action"), IntParam(spec, "opponent"),
        IntParam(spec, "opponent_action"), IntParam(spec, "switch_action"));
  }
  throw InvalidInputError("unknown learner '" + spec.name + "'");
}

std::string AgentModeName(AgentMode mode) {
  switch (mode) {
    case AgentMode::kFollowingMediator:
      return "FollowingMediator";
    case AgentMode::kRejectedByEq2:
      return "RejectedByEq2";
    case AgentMode::kRejectedByTest:
      return "RejectedByTest";
  }
  return "Unknown";
}

MixedStrategy DrawFallback(int action_count, std::uint64_t seed) {
  if (action_count < 1) throw InvalidInputError("action_count must be >= 1");
  if (action_count == 1) return MixedStrategy({1.0});
  Rng rng(seed);
  std::vector<double> point = UniformSimplexPoint(action_count, rng);
  // Renormalize so the sum is within tolerance after rounding.
  double sum = 0.0;
  for (double v : point) sum += v;
  for (double& v : point) v /= sum;
  return MixedStrategy(std::move(point));
}

AgentState::AgentState(int id, MixedStrategy fallback,
                       std::unique_ptr<Learner> learner, AgentPolicy policy)
    : id_(id),
      fallback_(std::move(fallback)),
      learner_(std::move(learner)),
      policy_(policy) {
  if (!learner_) throw InvalidInputError("agent needs a learner");
}

AgentState::AgentState(const AgentState& other)
    : id_(other.id_),
      mode_(other.mode_),
      fallback_(other.fallback_),
      learner_(other.learner_->Clone()),
      policy_(other.policy_) {}

AgentState& AgentState::operator=(const AgentState& other) {
  if (this != &other) {
    AgentState copy(other);
    *this = std::move(copy);
  }
  return *this;
}

int AgentAct(AgentState& state, const PhaseLocation& where,
             std::optional<int> signal, Rng& rng) {
  const Phase& phase = where.phase;
  if (!phase.is_test() && where.offset == 0) state.learner().Reset();

  if (state.policy() == AgentPolicy::kPureLearner) {
    const MixedStrategy s = state.learner().NextStrategy();
    return static_cast<int>(SampleIndex(s.probs(), rng));
  }
  if (state.mode() == AgentMode::kFollowingMediator) {
    if (!signal) {
      throw InvalidInputError("agent " + std::to_string(state.id()) +
                              " follows the mediator but got no signal");
    }
    if (*signal < 0 ||
        static_cast<std::size_t>(*signal) >= state.fallback().size()) {
      throw InvalidInputError("signal out of range");
    }
    return *signal;
  }
  if (phase.is_test()) {
    return static_cast<int>(SampleIndex(state.fallback().probs(), rng));
  }
  const MixedStrategy s = state.learner().NextStrategy();
  return static_cast<int>(SampleIndex(s.probs(), rng));
}

}  // namespace cetest
