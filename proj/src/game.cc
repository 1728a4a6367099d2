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

#include "cetest/game.h"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "cetest/error.h"

namespace cetest {

ActionSpace::ActionSpace(std::vector<int> action_counts)
    : counts_(std::move(action_counts)) {
  if (counts_.empty()) throw InvalidInputError("game needs at least one agent");
  strides_.assign(counts_.size(), 1);
  std::size_t size = 1;
  for (int i = num_agents() - 1; i >= 0; --i) {
    if (counts_[i] < 1) {
      throw InvalidInputError("agent " + std::to_string(i) +
                              " has no actions");
    }
    strides_[i] = size;
    if (size > std::numeric_limits<std::size_t>::max() /
                   static_cast<std::size_t>(counts_[i])) {
      throw InvalidInputError("joint action space too large");
    }
    size *= static_cast<std::size_t>(counts_[i]);
  }
  size_ = size;
}

JointIndex ActionSpace::Index(std::span<const int> actions) const {
  if (actions.size() != counts_.size()) {
    throw InvalidInputError("joint action has " +
                            std::to_string(actions.size()) +
                            " components, expected " +
                            std::to_string(counts_.size()));
  }
  JointIndex index = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= counts_[i]) {
      throw InvalidInputError("action " + std::to_string(actions[i]) +
                              " out of range for agent " + std::to_string(i));
    }
    index += static_cast<JointIndex>(actions[i]) * strides_[i];
  }
  return index;
}

JointAction ActionSpace::Decode(JointIndex index) const {
  if (index >= size_) throw InvalidInputError("joint index out of range");
  JointAction a(counts_.size());
  for (int i = 0; i < num_agents(); ++i) a[i] = ActionOf(index, i);
  return a;
}

Game::Game(std::vector<int> action_counts, std::vector<double> utilities,
           std::vector<std::vector<std::string>> action_names)
    : space_(std::move(action_counts)),
      utilities_(std::move(utilities)),
      action_names_(std::move(action_names)) {
  const std::size_t expected =
      space_.size() * static_cast<std::size_t>(num_agents());
  if (utilities_.size() != expected) {
    throw InvalidInputError("utility tensor has " +
                            std::to_string(utilities_.size()) +
                            " entries, expected " + std::to_string(expected));
  }
  for (std::size_t k = 0; k < utilities_.size(); ++k) {
    if (!std::isfinite(utilities_[k]) || utilities_[k] < 0.0) {
      std::ostringstream msg;
      msg << "utility for agent " << k % num_agents() << " at joint action "
          << k / num_agents() << " is " << utilities_[k]
          << "; utilities must be finite and >= 0";
      throw InvalidInputError(msg.str());
    }
  }
  if (!action_names_.empty()) {
    if (action_names_.size() != static_cast<std::size_t>(num_agents())) {
      throw InvalidInputError("action_names must list every agent");
    }
    for (int i = 0; i < num_agents(); ++i) {
      if (action_names_[i].size() !=
          static_cast<std::size_t>(action_count(i))) {
        throw InvalidInputError("action_names for agent " + std::to_string(i) +
                                " has the wrong length");
      }
    }
  }
}

std::string Game::ActionName(int agent, int action) const {
  if (!action_names_.empty()) return action_names_.at(agent).at(action);
  return "a_{" + std::to_string(agent + 1) + "," + std::to_string(action + 1) +
         "}";
}

void ValidateDistribution(std::span<const double> probs, const char* what) {
  if (probs.empty()) {
    throw InvalidInputError(std::string(what) + " is empty");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidInputError(std::string(what) +
                              " has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << what << " sums to " << sum << ", expected 1";
    throw InvalidInputError(msg.str());
  }
}

MixedStrategy::MixedStrategy(std::vector<double> probs)
    : probs_(std::move(probs)) {
  ValidateDistribution(probs_, "mixed strategy");
}

MixedStrategy MixedStrategy::Uniform(int action_count) {
  if (action_count < 1) throw InvalidInputError("action_count must be >= 1");
  return MixedStrategy(std::vector<double>(action_count, 1.0 / action_count));
}

MixedStrategy MixedStrategy::Pure(int action_count, int action) {
  if (action < 0 || action >= action_count) {
    throw InvalidInputError("pure action out of range");
  }
  std::vector<double> p(action_count, 0.0);
  p[action] = 1.0;
  return MixedStrategy(std::move(p));
}

CorrelatedStrategy::CorrelatedStrategy(ActionSpace space,
                                       std::vector<double> probs)
    : space_(std::move(space)), probs_(std::move(probs)) {
  if (probs_.size() != space_.size()) {
    throw InvalidInputError("correlated strategy has " +
                            std::to_string(probs_.size()) +
                            " entries, expected " +
                            std::to_string(space_.size()));
  }
  ValidateDistribution(probs_, "correlated strategy");
}

CorrelatedStrategy CorrelatedStrategy::PointMass(const ActionSpace& space,
                                                 JointIndex a) {
  std::vector<double> p(space.size(), 0.0);
  p.at(a) = 1.0;
  return CorrelatedStrategy(space, std::move(p));
}

CorrelatedStrategy CorrelatedStrategy::Product(
    std::span<const MixedStrategy> profile) {
  std::vector<int> counts;
  for (const auto& s : profile) counts.push_back(static_cast<int>(s.size()));
  ActionSpace space(counts);
  std::vector<double> p(space.size(), 1.0);
  for (JointIndex a = 0; a < space.size(); ++a) {
    for (int i = 0; i < space.num_agents(); ++i) {
      p[a] *= profile[i][space.ActionOf(a, i)];
    }
  }
  return CorrelatedStrategy(std::move(space), std::move(p));
}

double CorrelatedStrategy::SignalMarginal(int agent, int signal) const {
  double m = 0.0;
  for (JointIndex a = 0; a < probs_.size(); ++a) {
    if (space_.ActionOf(a, agent) == signal) m += probs_[a];
  }
  return m;
}

std::vector<double> ExpectedUtility(const Game& game,
                                    std::span<const MixedStrategy> profile) {
  if (profile.size() != static_cast<std::size_t>(game.num_agents())) {
    throw InvalidInputError("profile has " + std::to_string(profile.size()) +
                            " strategies for a " +
                            std::to_string(game.num_agents()) + "-agent game");
  }
  for (int i = 0; i < game.num_agents(); ++i) {
    if (profile[i].size() != static_cast<std::size_t>(game.action_count(i))) {
      throw InvalidInputError("strategy for agent " + std::to_string(i) +
                              " has the wrong number of actions");
    }
  }
  const ActionSpace& space = game.space();
  std::vector<double> out(game.num_agents(), 0.0);
  for (JointIndex a = 0; a < space.size(); ++a) {
    double weight = 1.0;
    for (int j = 0; j < game.num_agents(); ++j) {
      weight *= profile[j][space.ActionOf(a, j)];
    }
    if (weight == 0.0) continue;
    for (int i = 0; i < game.num_agents(); ++i) {
      out[i] += game.utility(a, i) * weight;
    }
  }
  return out;
}

namespace {

void CheckAgentSignal(const ActionSpace& space, int agent, int signal) {
  if (agent < 0 || agent >= space.num_agents()) {
    throw InvalidInputError("agent index out of range");
  }
  if (signal < 0 || signal >= space.action_count(agent)) {
    throw InvalidInputError("signal out of range");
  }
}

// Index of a_{-i} among the opponents' joint actions (row-major, agent i
// removed).
std::size_t OpponentIndex(const ActionSpace& space, JointIndex a, int agent) {
  std::size_t idx = 0;
  for (int j = 0; j < space.num_agents(); ++j) {
    if (j == agent) continue;
    idx = idx * static_cast<std::size_t>(space.action_count(j)) +
          static_cast<std::size_t>(space.ActionOf(a, j));
  }
  return idx;
}

}  // namespace

std::vector<double> ConditionalGivenSignal(const CorrelatedStrategy& sigma,
                                           int agent, int signal) {
  const ActionSpace& space = sigma.space();
  CheckAgentSignal(space, agent, signal);
  const std::size_t opponents =
      space.size() / static_cast<std::size_t>(space.action_count(agent));
  std::vector<double> cond(opponents, 0.0);
  double marginal = 0.0;
  for (JointIndex a = 0; a < space.size(); ++a) {
    if (space.ActionOf(a, agent) != signal) continue;
    cond[OpponentIndex(space, a, agent)] += sigma[a];
    marginal += sigma[a];
  }
  if (marginal <= 0.0) {
    throw UndefinedConditionalError("signal " + std::to_string(signal) +
                                    " for agent " + std::to_string(agent) +
                                    " has zero probability");
  }
  for (double& c : cond) c /= marginal;
  return cond;
}

std::vector<int> CeVerdict::ViolatingAgents() const {
  std::set<int> agents;
  for (const auto& v : violations) agents.insert(v.agent);
  return {agents.begin(), agents.end()};
}

bool CeVerdict::AgentSatisfies(int agent) const {
  for (const auto& v : violations) {
    if (v.agent == agent) return false;
  }
  return true;
}

namespace {

void AppendAgentViolations(const Game& game, const CorrelatedStrategy& sigma,
                           int agent, double tolerance,
                           std::vector<CeViolation>& out) {
  const ActionSpace& space = game.space();
  const int k = game.action_count(agent);
  for (int signal = 0; signal < k; ++signal) {
    // Unnormalized conditional payoffs Σ_{s_-i} σ(s_i, s_-i) u_i(a'_i, s_-i);
    // dividing by the signal marginal gives the conditional form.
    std::vector<double> payoff(k, 0.0);
    double marginal = 0.0;
    for (JointIndex a = 0; a < space.size(); ++a) {
      if (space.ActionOf(a, agent) != signal) continue;
      const double w = sigma[a];
      if (w == 0.0) continue;
      marginal += w;
      for (int dev = 0; dev < k; ++dev) {
        payoff[dev] += w * game.utility(space.WithAction(a, agent, dev), agent);
      }
    }
    if (marginal <= 0.0) continue;
    for (int dev = 0; dev < k; ++dev) {
      if (dev == signal) continue;
      const double gap = (payoff[dev] - payoff[signal]) / marginal;
      if (gap > tolerance) out.push_back({agent, signal, dev, gap});
    }
  }
}

void CheckShapes(const Game& game, const CorrelatedStrategy& sigma) {
  if (!(game.space() == sigma.space())) {
    throw InvalidInputError("strategy does not match the game's action sets");
  }
}

}  // namespace

CeVerdict CheckCorrelatedEquilibrium(const Game& game,
                                     const CorrelatedStrategy& sigma,
                                     double tolerance) {
  CheckShapes(game, sigma);
  if (!(tolerance >= 0.0)) throw InvalidInputError("tolerance must be >= 0");
  CeVerdict verdict;
  for (int i = 0; i < game.num_agents(); ++i) {
    AppendAgentViolations(game, sigma, i, tolerance, verdict.violations);
  }
  verdict.is_equilibrium = verdict.violations.empty();
  return verdict;
}

bool SatisfiesCeConstraints(const Game& game, const CorrelatedStrategy& sigma,
                            int agent, double tolerance) {
  CheckShapes(game, sigma);
  if (agent < 0 || agent >= game.num_agents()) {
    throw InvalidInputError("agent index out of range");
  }
  std::vector<CeViolation> v;
  AppendAgentViolations(game, sigma, agent, tolerance, v);
  return v.empty();
}

double MarginalExcludingMask(const CorrelatedStrategy& sigma,
                             std::uint32_t excluded_mask, JointIndex joint) {
  const ActionSpace& space = sigma.space();
  double m = 0.0;
  for (JointIndex a = 0; a < space.size(); ++a) {
    bool match = true;
    for (int i = 0; i < space.num_agents() && match; ++i) {
      if (excluded_mask & (1u << i)) continue;
      match = space.ActionOf(a, i) == space.ActionOf(joint, i);
    }
    if (match) m += sigma[a];
  }
  return m;
}

double MarginalExcluding(const CorrelatedStrategy& sigma,
                         std::span<const int> excluded_agents,
                         std::span<const int> partial_action) {
  const ActionSpace& space = sigma.space();
  const int n = space.num_agents();
  if (n > 31) throw InvalidInputError("too many agents");
  std::uint32_t mask = 0;
  for (int i : excluded_agents) {
    if (i < 0 || i >= n) throw InvalidInputError("excluded agent out of range");
    if (mask & (1u << i)) throw InvalidInputError("duplicate excluded agent");
    mask |= 1u << i;
  }
  const std::size_t kept = static_cast<std::size_t>(n) - excluded_agents.size();
  if (partial_action.size() != kept) {
    throw InvalidInputError("partial action must list every non-excluded agent");
  }
  JointAction full(n, 0);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) continue;
    full[i] = partial_action[k++];
  }
  return MarginalExcludingMask(sigma, mask, space.Index(full));
}

}  // namespace cetest
