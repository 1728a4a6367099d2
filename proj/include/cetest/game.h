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

// Normal-form games, mixed and correlated strategies, and the correlated
// equilibrium check.
//
// Joint actions are enumerated row-major over (a_1, ..., a_n): the last
// agent's action varies fastest. Every vector indexed by joint action uses
// that order. Agents and actions are 0-based throughout the library.

#ifndef CETEST_GAME_H_
#define CETEST_GAME_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cetest {

using JointIndex = std::size_t;
// One action index per agent.
using JointAction = std::vector<int>;

inline constexpr double kProbabilityTolerance = 1e-9;
inline constexpr double kDefaultCeTolerance = 1e-9;

// The shape of A = A_1 x ... x A_n and the row-major index arithmetic on it.
class ActionSpace {
 public:
  ActionSpace() = default;
  explicit ActionSpace(std::vector<int> action_counts);

  int num_agents() const { return static_cast<int>(counts_.size()); }
  int action_count(int agent) const { return counts_.at(agent); }
  const std::vector<int>& action_counts() const { return counts_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int agent) const { return strides_[agent]; }

  JointIndex Index(std::span<const int> actions) const;
  JointAction Decode(JointIndex index) const;
  int ActionOf(JointIndex index, int agent) const {
    return static_cast<int>((index / strides_[agent]) % counts_[agent]);
  }
  JointIndex WithAction(JointIndex index, int agent, int action) const {
    return index - static_cast<JointIndex>(ActionOf(index, agent)) * strides_[agent] +
           static_cast<JointIndex>(action) * strides_[agent];
  }

  bool operator==(const ActionSpace& other) const {
    return counts_ == other.counts_;
  }

 private:
  std::vector<int> counts_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

// A n-agent stage game with nonnegative utilities.
class Game {
 public:
  // `utilities` is row-major over joint actions, with num_agents consecutive
  // entries per joint action. Throws InvalidInputError on a shape mismatch or
  // any negative utility.
  Game(std::vector<int> action_counts, std::vector<double> utilities,
       std::vector<std::vector<std::string>> action_names = {});

  int num_agents() const { return space_.num_agents(); }
  int action_count(int agent) const { return space_.action_count(agent); }
  const std::vector<int>& action_counts() const { return space_.action_counts(); }
  std::size_t num_joint_actions() const { return space_.size(); }
  const ActionSpace& space() const { return space_; }

  double utility(JointIndex a, int agent) const {
    return utilities_[a * static_cast<std::size_t>(num_agents()) +
                      static_cast<std::size_t>(agent)];
  }
  std::span<const double> utilities() const { return utilities_; }

  // Empty when the game was built without names.
  const std::vector<std::vector<std::string>>& action_names() const {
    return action_names_;
  }
  // The configured name, or "a_{i,k}" with 1-based indices.
  std::string ActionName(int agent, int action) const;

 private:
  ActionSpace space_;
  std::vector<double> utilities_;
  std::vector<std::vector<std::string>> action_names_;
};

// σ_i: a distribution over one agent's actions.
class MixedStrategy {
 public:
  MixedStrategy() = default;
  explicit MixedStrategy(std::vector<double> probs);

  static MixedStrategy Uniform(int action_count);
  static MixedStrategy Pure(int action_count, int action);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::span<const double> probs() const { return probs_; }

  bool operator==(const MixedStrategy&) const = default;

 private:
  std::vector<double> probs_;
};

// σ_A: a distribution over joint actions, row-major.
class CorrelatedStrategy {
 public:
  CorrelatedStrategy() = default;
  CorrelatedStrategy(ActionSpace space, std::vector<double> probs);

  static CorrelatedStrategy PointMass(const ActionSpace& space, JointIndex a);
  static CorrelatedStrategy Product(std::span<const MixedStrategy> profile);

  const ActionSpace& space() const { return space_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](JointIndex a) const { return probs_[a]; }
  std::span<const double> probs() const { return probs_; }

  // Σ over opponents of σ_A(signal, s_{-i}).
  double SignalMarginal(int agent, int signal) const;

 private:
  ActionSpace space_;
  std::vector<double> probs_;
};

// Throws InvalidInputError unless every entry is >= 0 and the sum is 1
// within kProbabilityTolerance.
void ValidateDistribution(std::span<const double> probs, const char* what);

// u_i(σ) = Σ_a u_i(a) Π_j σ_j(a_j) for every agent i.
std::vector<double> ExpectedUtility(const Game& game,
                                    std::span<const MixedStrategy> profile);

// σ_{A_{-i}}(· | s_i) as a row-major vector over the opponents' joint
// actions (agents in increasing order, `agent` removed). Throws
// UndefinedConditionalError when the signal has zero marginal.
std::vector<double> ConditionalGivenSignal(const CorrelatedStrategy& sigma,
                                           int agent, int signal);

struct CeViolation {
  int agent = 0;
  int signal = 0;
  int deviation = 0;
  // Conditional expected gain of playing `deviation` instead of `signal`.
  double gap = 0.0;
};

struct CeVerdict {
  bool is_equilibrium = true;
  std::vector<CeViolation> violations;

  // Agents with at least one violation (N_B), ascending.
  std::vector<int> ViolatingAgents() const;
  bool AgentSatisfies(int agent) const;
};

// Checks the correlated-equilibrium inequalities for every agent, every
// signal with positive marginal, and every deviation. Gaps at or below
// `tolerance` count as satisfied.
CeVerdict CheckCorrelatedEquilibrium(const Game& game,
                                     const CorrelatedStrategy& sigma,
                                     double tolerance = kDefaultCeTolerance);

// Same check restricted to one agent.
bool SatisfiesCeConstraints(const Game& game, const CorrelatedStrategy& sigma,
                            int agent, double tolerance = kDefaultCeTolerance);

// Σ over the excluded agents' actions of σ_A, with the remaining agents
// fixed to `partial_action` (listed in increasing agent order). Excluding
// every agent gives 1.
double MarginalExcluding(const CorrelatedStrategy& sigma,
                         std::span<const int> excluded_agents,
                         std::span<const int> partial_action);

// Bitmask form used by the verifier: bit i set means agent i is excluded.
// `joint` supplies the non-excluded agents' actions.
double MarginalExcludingMask(const CorrelatedStrategy& sigma,
                             std::uint32_t excluded_mask, JointIndex joint);

}  // namespace cetest

#endif  // CETEST_GAME_H_
