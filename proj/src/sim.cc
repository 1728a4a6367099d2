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

#include "cetest/sim.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "cetest/error.h"
#include "cetest/rng.h"

namespace cetest {

namespace {

constexpr std::uint64_t kMediatorTag = 0x6d6564;
constexpr std::uint64_t kAgentTag = 0x6167656e74;
constexpr std::uint64_t kFallbackTag = 0x66616c6c;

constexpr std::int64_t kMaxDenominator = 100000;
constexpr std::int64_t kMaxScale = 1000000;
constexpr double kMaxScaledUtility = 1e9;

// Smallest q <= kMaxDenominator such that round(u * q) / q reproduces u
// exactly, or 0.
std::int64_t Denominator(double u) {
  for (std::int64_t q = 1; q <= kMaxDenominator; ++q) {
    const double d = static_cast<double>(q);
    if (std::round(u * d) / d == u) return q;
  }
  return 0;
}

}  // namespace

std::vector<double> EmpiricalFrequency::Distribution() const {
  if (total <= 0) throw NoDataError("empty frequency window");
  std::vector<double> out(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a) {
    out[a] = static_cast<double>(counts[a]) / static_cast<double>(total);
  }
  return out;
}

UtilityLedger::UtilityLedger(const Game& game, std::vector<Phase> phases)
    : num_agents_(game.num_agents()), phases_(std::move(phases)) {
  const std::span<const double> u = game.utilities();
  utility_.assign(u.begin(), u.end());
  exact_ = true;
  std::int64_t scale = 1;
  for (double v : u) {
    const std::int64_t q = Denominator(v);
    if (q == 0) {
      exact_ = false;
      break;
    }
    scale = std::lcm(scale, q);
    if (scale > kMaxScale) {
      exact_ = false;
      break;
    }
  }
  if (exact_) {
    for (double v : u) {
      if (std::fabs(v) * static_cast<double>(scale) > kMaxScaledUtility) {
        exact_ = false;
        break;
      }
    }
  }
  if (exact_) {
    scale_ = scale;
    scaled_utility_.reserve(u.size());
    for (double v : u) {
      scaled_utility_.push_back(
          std::llround(v * static_cast<double>(scale_)));
    }
    cum_scaled_.assign(num_agents_, std::vector<std::int64_t>{0});
  } else {
    scale_ = 1;
    cum_.assign(num_agents_, std::vector<double>{0.0});
  }
}

void UtilityLedger::Record(JointIndex joint_action) {
  const std::size_t base = joint_action * static_cast<std::size_t>(num_agents_);
  if (base >= utility_.size()) throw InvalidInputError("joint action out of range");
  for (int i = 0; i < num_agents_; ++i) {
    if (exact_) {
      cum_scaled_[i].push_back(cum_scaled_[i].back() + scaled_utility_[base + i]);
    } else {
      cum_[i].push_back(cum_[i].back() + utility_[base + i]);
    }
  }
  ++rounds_;
}

void UtilityLedger::CheckAgent(int agent) const {
  if (agent < 0 || agent >= num_agents_) {
    throw InvalidInputError("agent index out of range");
  }
}

std::int64_t UtilityLedger::ScaledCumulative(int agent, std::int64_t t) const {
  CheckAgent(agent);
  if (!exact_) throw std::logic_error("ledger is not integer-scaled");
  if (t < 0 || t > rounds_) throw InvalidInputError("round out of range");
  return cum_scaled_[agent][static_cast<std::size_t>(t)];
}

double UtilityLedger::Cumulative(int agent, std::int64_t t) const {
  CheckAgent(agent);
  if (t < 0 || t > rounds_) throw InvalidInputError("round out of range");
  if (exact_) {
    return static_cast<double>(cum_scaled_[agent][static_cast<std::size_t>(t)]) /
           static_cast<double>(scale_);
  }
  return cum_[agent][static_cast<std::size_t>(t)];
}

std::int64_t UtilityLedger::ScaledSegment(int agent,
                                          std::size_t phase_index) const {
  const Phase& ph = phases_.at(phase_index);
  const std::int64_t lo = std::min(ph.begin - 1, rounds_);
  const std::int64_t hi = std::min(ph.last(), rounds_);
  return ScaledCumulative(agent, hi) - ScaledCumulative(agent, lo);
}

double UtilityLedger::Segment(int agent, std::size_t phase_index) const {
  const Phase& ph = phases_.at(phase_index);
  const std::int64_t lo = std::min(ph.begin - 1, rounds_);
  const std::int64_t hi = std::min(ph.last(), rounds_);
  if (exact_) {
    return static_cast<double>(ScaledCumulative(agent, hi) -
                               ScaledCumulative(agent, lo)) /
           static_cast<double>(scale_);
  }
  return Cumulative(agent, hi) - Cumulative(agent, lo);
}

double AverageUtility(const UtilityLedger& ledger, int agent,
                      std::int64_t up_to_t) {
  if (up_to_t < 1) throw InvalidInputError("up_to_t must be >= 1");
  if (up_to_t > ledger.rounds()) {
    throw InvalidInputError("up_to_t beyond the recorded rounds");
  }
  return ledger.Cumulative(agent, up_to_t) / static_cast<double>(up_to_t);
}

double FreePeriodAverageUtility(const UtilityLedger& ledger, int agent,
                                std::int64_t up_to_t) {
  if (up_to_t < 1) throw InvalidInputError("up_to_t must be >= 1");
  if (up_to_t > ledger.rounds()) {
    throw InvalidInputError("up_to_t beyond the recorded rounds");
  }
  std::int64_t n = 0;
  std::int64_t scaled = 0;
  double sum = 0.0;
  for (const Phase& ph : ledger.phases()) {
    if (ph.is_test() || ph.begin > up_to_t) continue;
    const std::int64_t lo = ph.begin - 1;
    const std::int64_t hi = std::min(ph.last(), up_to_t);
    n += hi - lo;
    if (ledger.exact()) {
      scaled += ledger.ScaledCumulative(agent, hi) -
                ledger.ScaledCumulative(agent, lo);
    } else {
      sum += ledger.Cumulative(agent, hi) - ledger.Cumulative(agent, lo);
    }
  }
  if (n == 0) throw NoDataError("no free-period rounds up to t");
  if (ledger.exact()) {
    sum = static_cast<double>(scaled) / static_cast<double>(ledger.scale());
  }
  return sum / static_cast<double>(n);
}

std::optional<Decision> Transcript::DecisionAt(int agent, int test) const {
  for (const DecisionRecord& d : decisions) {
    if (d.agent == agent && d.test == test) return d.decision;
  }
  return std::nullopt;
}

Transcript RunGame(const Game& game, const CorrelatedStrategy& sigma_m,
                   const Schedule& schedule,
                   const std::vector<AgentConfig>& agents, std::uint64_t seed,
                   std::int64_t rounds, const RunOptions& options) {
  const int n = game.num_agents();
  const ActionSpace& space = game.space();
  if (!(sigma_m.space() == space)) {
    throw InvalidInputError("mediator strategy does not match the game");
  }
  if (static_cast<int>(agents.size()) != n) {
    throw InvalidInputError("expected " + std::to_string(n) +
                            " agent configs, got " +
                            std::to_string(agents.size()));
  }
  if (rounds < 0) rounds = schedule.horizon();
  if (rounds > schedule.horizon()) {
    throw HorizonExceededError("requested " + std::to_string(rounds) +
                               " rounds but the schedule covers " +
                               std::to_string(schedule.horizon()));
  }

  Transcript tr;
  tr.seed = seed;
  tr.config_snapshot = options.config_snapshot;
  tr.phases = schedule.phases();
  tr.num_joint_actions = space.size();

  std::vector<AgentState> states;
  states.reserve(n);
  std::vector<bool> eq2_ok(n);
  for (int i = 0; i < n; ++i) {
    const AgentConfig& cfg = agents[i];
    MixedStrategy fallback =
        cfg.fallback ? *cfg.fallback
                     : DrawFallback(game.action_count(i),
                                    StreamSeed(seed, {kFallbackTag, static_cast<std::uint64_t>(i)}));
    if (static_cast<int>(fallback.size()) != game.action_count(i)) {
      throw InvalidInputError("fall-back of agent " + std::to_string(i) +
                              " has the wrong number of actions");
    }
    tr.fallbacks.push_back(fallback);
    states.emplace_back(i, std::move(fallback), MakeLearner(cfg.learner, game, i),
                        cfg.policy);
    eq2_ok[i] = SatisfiesCeConstraints(game, sigma_m, i);
  }

  tr.ledger = UtilityLedger(game, tr.phases);
  tr.rounds.reserve(static_cast<std::size_t>(rounds));
  std::vector<std::int64_t> counts(space.size(), 0);
  std::vector<int> actions(n);
  std::size_t phase_index = 0;

  for (std::int64_t t = 1; t <= rounds; ++t) {
    while (tr.phases[phase_index].last() < t) ++phase_index;
    const Phase& phase = tr.phases[phase_index];
    const PhaseLocation where{phase, t - phase.begin};

    if (phase.is_test() && where.offset == 0) {
      std::fill(counts.begin(), counts.end(), 0);
      for (int i = 0; i < n; ++i) {
        states[i].set_mode(eq2_ok[i] ? AgentMode::kFollowingMediator
                                     : AgentMode::kRejectedByEq2);
      }
    }

    JointIndex signal;
    if (options.signal_source) {
      signal = options.signal_source(t);
      if (signal >= space.size()) throw InvalidInputError("signal out of range");
    } else {
      Rng mediator(StreamSeed(seed, {kMediatorTag, static_cast<std::uint64_t>(t)}));
      signal = SampleIndex(sigma_m.probs(), mediator);
    }

    for (int i = 0; i < n; ++i) {
      Rng rng(StreamSeed(seed, {kAgentTag + static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(t)}));
      actions[i] = AgentAct(states[i], where, space.ActionOf(signal, i), rng);
    }
    const JointIndex joint = space.Index(actions);
    tr.rounds.push_back(
        {t, static_cast<std::uint32_t>(phase_index), signal, joint});
    tr.ledger.Record(joint);
    for (auto& s : states) s.learner().Observe(joint);

    if (phase.is_test()) {
      ++counts[joint];
      if (t == phase.last()) {
        const TestPlan& plan = schedule.plan(phase.index);
        for (int i = 0; i < n; ++i) {
          if (states[i].policy() != AgentPolicy::kLambda) continue;
          Decision d = RunSamplingDecision(plan, game, sigma_m, i, counts);
          if (d.outcome == Outcome::kFollowMediator) {
            states[i].set_mode(AgentMode::kFollowingMediator);
          } else if (d.outcome == Outcome::kRejectByEq2) {
            states[i].set_mode(AgentMode::kRejectedByEq2);
          } else {
            states[i].set_mode(AgentMode::kRejectedByTest);
          }
          tr.decisions.push_back({i, phase.index, d});
        }
      }
    }
  }
  return tr;
}

std::vector<std::int64_t> SampleTestCounts(
    const CorrelatedStrategy& sigma_m,
    const std::vector<std::optional<MixedStrategy>>& deviations,
    std::int64_t length, std::uint64_t seed) {
  const ActionSpace& space = sigma_m.space();
  const int n = space.num_agents();
  if (static_cast<int>(deviations.size()) != n) {
    throw InvalidInputError("one deviation entry per agent required");
  }
  for (int i = 0; i < n; ++i) {
    if (deviations[i] &&
        static_cast<int>(deviations[i]->size()) != space.action_count(i)) {
      throw InvalidInputError("deviation of agent " + std::to_string(i) +
                              " has the wrong number of actions");
    }
  }
  if (length < 1) throw InvalidInputError("test length must be >= 1");
  std::vector<std::int64_t> counts(space.size(), 0);
  std::vector<int> actions(n);
  for (std::int64_t t = 1; t <= length; ++t) {
    Rng mediator(StreamSeed(seed, {kMediatorTag, static_cast<std::uint64_t>(t)}));
    const JointIndex signal = SampleIndex(sigma_m.probs(), mediator);
    for (int i = 0; i < n; ++i) {
      if (deviations[i]) {
        Rng rng(StreamSeed(seed, {kAgentTag + static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(t)}));
        actions[i] = static_cast<int>(SampleIndex(deviations[i]->probs(), rng));
      } else {
        actions[i] = space.ActionOf(signal, i);
      }
    }
    ++counts[space.Index(actions)];
  }
  return counts;
}

EmpiricalFrequency ComputeEmpiricalFrequency(const Transcript& transcript,
                                             std::int64_t from_t,
                                             std::int64_t to_t) {
  const std::int64_t played = static_cast<std::int64_t>(transcript.rounds.size());
  if (from_t < 1 || to_t > played || from_t > to_t) {
    throw InvalidInputError("window [" + std::to_string(from_t) + ", " +
                            std::to_string(to_t) + "] outside rounds 1.." +
                            std::to_string(played));
  }
  EmpiricalFrequency f;
  f.counts.assign(transcript.num_joint_actions, 0);
  for (std::int64_t t = from_t; t <= to_t; ++t) {
    ++f.counts[transcript.rounds[static_cast<std::size_t>(t - 1)].action];
  }
  f.total = to_t - from_t + 1;
  return f;
}

double TvDistance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidInputError("TV distance size mismatch");
  double s = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) s += std::fabs(p[a] - q[a]);
  return 0.5 * s;
}

std::vector<double> FreePeriodTvDistances(const Transcript& transcript,
                                          const CorrelatedStrategy& sigma_m) {
  std::vector<double> out;
  const std::int64_t played = static_cast<std::int64_t>(transcript.rounds.size());
  for (const Phase& ph : transcript.phases) {
    if (ph.is_test() || ph.last() > played) continue;
    std::vector<double> freq(sigma_m.size(), 0.0);
    for (std::int64_t t = ph.begin; t <= ph.last(); ++t) {
      freq[transcript.rounds[static_cast<std::size_t>(t - 1)].action] += 1.0;
    }
    for (double& v : freq) v /= static_cast<double>(ph.length);
    out.push_back(TvDistance(freq, sigma_m.probs()));
  }
  return out;
}

namespace {

struct Enumerator {
  const Game& game;
  const Schedule& schedule;
  std::int64_t rounds;
  std::vector<std::vector<double>>& out;

  void Visit(std::int64_t t, double prob, std::vector<AgentState>& states) {
    if (t > rounds) return;
    const PhaseLocation where = schedule.Locate(t);
    if (!where.phase.is_test() && where.offset == 0) {
      for (auto& s : states) s.learner().Reset();
    }
    const ActionSpace& space = game.space();
    std::vector<MixedStrategy> profile;
    profile.reserve(states.size());
    for (const auto& s : states) profile.push_back(s.learner().NextStrategy());
    const CorrelatedStrategy play = CorrelatedStrategy::Product(profile);
    for (JointIndex a = 0; a < space.size(); ++a) {
      const double q = play[a];
      if (q == 0.0) continue;
      out[static_cast<std::size_t>(t - 1)][a] += prob * q;
      if (t == rounds) continue;
      std::vector<AgentState> next = states;
      for (auto& s : next) s.learner().Observe(a);
      Visit(t + 1, prob * q, next);
    }
  }
};

}  // namespace

std::vector<std::vector<double>> ExactExpectedPlay(
    const Game& game, const Schedule& schedule,
    const std::vector<AgentConfig>& agents, std::int64_t rounds) {
  const int n = game.num_agents();
  if (static_cast<int>(agents.size()) != n) {
    throw InvalidInputError("one agent config per agent required");
  }
  if (rounds < 1 || rounds > 12) {
    throw InvalidInputError("exact enumeration needs 1 <= rounds <= 12");
  }
  if (std::pow(static_cast<double>(game.num_joint_actions()),
               static_cast<double>(rounds)) > 16777216.0) {
    throw InvalidInputError("too many histories to enumerate");
  }
  if (rounds > schedule.horizon()) {
    throw HorizonExceededError("rounds beyond the schedule horizon");
  }
  std::vector<AgentState> states;
  for (int i = 0; i < n; ++i) {
    if (agents[i].policy != AgentPolicy::kPureLearner) {
      throw InvalidInputError("exact enumeration supports pure learners only");
    }
    states.emplace_back(i, MixedStrategy::Uniform(game.action_count(i)),
                        MakeLearner(agents[i].learner, game, i),
                        AgentPolicy::kPureLearner);
  }
  std::vector<std::vector<double>> out(
      static_cast<std::size_t>(rounds),
      std::vector<double>(game.num_joint_actions(), 0.0));
  Enumerator e{game, schedule, rounds, out};
  e.Visit(1, 1.0, states);
  return out;
}

std::vector<Transcript> RunBatch(const Game& game,
                                 const CorrelatedStrategy& sigma_m,
                                 const Schedule& schedule,
                                 const std::vector<AgentConfig>& agents,
                                 std::span<const std::uint64_t> seeds,
                                 std::int64_t rounds, int threads) {
  return ParallelMap(
      seeds,
      [&](std::uint64_t seed) {
        return RunGame(game, sigma_m, schedule, agents, seed, rounds);
      },
      threads);
}

}  // namespace cetest
