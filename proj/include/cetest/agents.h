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

#ifndef CETEST_AGENTS_H_
#define CETEST_AGENTS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "cetest/game.h"
#include "cetest/rng.h"
#include "cetest/schedule.h"

namespace cetest {

// A learning algorithm L_i. Learners expose distributions; the caller
// samples actions. Reset() must restore the exact state of a freshly
// constructed instance, so behavior inside a free period never depends on
// anything observed before it.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual void Reset() = 0;
  virtual void Observe(JointIndex joint_action) = 0;
  virtual MixedStrategy NextStrategy() const = 0;
  virtual std::unique_ptr<Learner> Clone() const = 0;
  virtual std::string name() const = 0;
};

// Name plus numeric parameters, as read from a run config.
//   uniform:          no parameters
//   fictitious-play:  no parameters
//   trigger:          action, opponent, opponent_action, switch_action
struct LearnerSpec {
  std::string name = "uniform";
  std::map<std::string, double> params;
};

// Always the uniform strategy.
class UniformLearner : public Learner {
 public:
  explicit UniformLearner(int action_count) : action_count_(action_count) {}
  void Reset() override {}
  void Observe(JointIndex) override {}
  MixedStrategy NextStrategy() const override {
    return MixedStrategy::Uniform(action_count_);
  }
  std::unique_ptr<Learner> Clone() const override {
    return std::make_unique<UniformLearner>(*this);
  }
  std::string name() const override { return "uniform"; }

 private:
  int action_count_;
};

// Pure best response to the product of the opponents' empirical marginals
// since the last reset; ties go to the lowest action. Uniform before any
// observation.
class FictitiousPlayLearner : public Learner {
 public:
  FictitiousPlayLearner(const Game& game, int agent);
  void Reset() override;
  void Observe(JointIndex joint_action) override;
  MixedStrategy NextStrategy() const override;
  std::unique_ptr<Learner> Clone() const override {
    return std::make_unique<FictitiousPlayLearner>(*this);
  }
  std::string name() const override { return "fictitious-play"; }

 private:
  const Game* game_;
  int agent_;
  // counts_[j][k]: times agent j played k since the last reset.
  std::vector<std::vector<std::int64_t>> counts_;
  std::int64_t observed_ = 0;
};

// Plays `action` until `opponent` is seen playing `opponent_action` since the
// last reset, then plays `switch_action`.
class TriggerLearner : public Learner {
 public:
  TriggerLearner(const Game& game, int agent, int action, int opponent,
                 int opponent_action, int switch_action);
  void Reset() override { triggered_ = false; }
  void Observe(JointIndex joint_action) override;
  MixedStrategy NextStrategy() const override;
  std::unique_ptr<Learner> Clone() const override {
    return std::make_unique<TriggerLearner>(*this);
  }
  std::string name() const override { return "trigger"; }

 private:
  const Game* game_;
  int action_count_;
  int action_;
  int opponent_;
  int opponent_action_;
  int switch_action_;
  bool triggered_ = false;
};

// The game must outlive the learner.
std::unique_ptr<Learner> MakeLearner(const LearnerSpec& spec, const Game& game,
                                     int agent);

enum class AgentMode { kFollowingMediator, kRejectedByEq2, kRejectedByTest };
std::string AgentModeName(AgentMode mode);

// kLambda runs the verification algorithm; kPureLearner ignores the mediator
// and uses its learner every round (the baseline the algorithm is compared
// against).
enum class AgentPolicy { kLambda, kPureLearner };

// γ_i uniform on the simplex, deterministic in seed.
MixedStrategy DrawFallback(int action_count, std::uint64_t seed);

class AgentState {
 public:
  AgentState(int id, MixedStrategy fallback, std::unique_ptr<Learner> learner,
             AgentPolicy policy = AgentPolicy::kLambda);
  AgentState(const AgentState& other);
  AgentState& operator=(const AgentState& other);
  AgentState(AgentState&&) noexcept = default;
  AgentState& operator=(AgentState&&) noexcept = default;

  int id() const { return id_; }
  AgentMode mode() const { return mode_; }
  void set_mode(AgentMode mode) { mode_ = mode; }
  AgentPolicy policy() const { return policy_; }
  const MixedStrategy& fallback() const { return fallback_; }
  Learner& learner() { return *learner_; }
  const Learner& learner() const { return *learner_; }

 private:
  int id_;
  AgentMode mode_ = AgentMode::kFollowingMediator;
  MixedStrategy fallback_;
  std::unique_ptr<Learner> learner_;
  AgentPolicy policy_;
};

// One agent's action for one round.
//   following the mediator         -> the signal
//   rejected, inside a test        -> a draw from the fall-back γ_i
//   rejected, inside a free period -> a draw from the learner's strategy
// A pure learner always draws from its learner. The learner is reset on the
// first round of every free period. Throws InvalidInputError when a
// following agent has no signal.
int AgentAct(AgentState& state, const PhaseLocation& where,
             std::optional<int> signal, Rng& rng);

}  // namespace cetest

#endif  // CETEST_AGENTS_H_
