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

// The repeated game with a mediator. Each round the mediator draws a joint
// signal from σ^M and hands each agent its own component; agents act; the
// joint action is public. At the end of every sampling test each agent
// running the verification algorithm decides, from that test's counts
// alone, whether to keep following the mediator through the next free
// period.
//
// Randomness is keyed by (seed, round, agent): the mediator and each agent
// draw from independent streams, so an agent's action depends only on its
// own signal, its own state, and its own stream, and two runs with the same
// seed share every draw that both of them make.

#ifndef CETEST_SIM_H_
#define CETEST_SIM_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cetest/agents.h"
#include "cetest/game.h"
#include "cetest/schedule.h"
#include "cetest/verifier.h"

namespace cetest {

struct AgentConfig {
  AgentPolicy policy = AgentPolicy::kLambda;
  LearnerSpec learner;
  // Fixed γ_i. Drawn uniformly from the seed when absent.
  std::optional<MixedStrategy> fallback;
};

struct RoundRecord {
  std::int64_t t = 0;
  std::uint32_t phase = 0;  // index into the schedule's phases()
  JointIndex signal = 0;
  JointIndex action = 0;
};

struct DecisionRecord {
  int agent = 0;
  int test = 0;  // j
  Decision decision;
};

struct EmpiricalFrequency {
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  std::vector<double> Distribution() const;
};

// Per-agent realized utility, by round and by phase. When every utility is
// a multiple of 1/scale for a modest integer scale (all the bundled games
// qualify), sums are kept as exact integers so phase segments partition the
// total with no rounding.
class UtilityLedger {
 public:
  UtilityLedger() = default;
  UtilityLedger(const Game& game, std::vector<Phase> phases);

  void Record(JointIndex joint_action);

  int num_agents() const { return num_agents_; }
  std::int64_t rounds() const { return rounds_; }
  bool exact() const { return exact_; }
  std::int64_t scale() const { return scale_; }
  const std::vector<Phase>& phases() const { return phases_; }

  // Σ over rounds 1..t.
  double Cumulative(int agent, std::int64_t t) const;
  double Total(int agent) const { return Cumulative(agent, rounds_); }
  // Σ over the recorded rounds of phases()[phase_index].
  double Segment(int agent, std::size_t phase_index) const;
  // Integer-scaled forms; only valid when exact().
  std::int64_t ScaledCumulative(int agent, std::int64_t t) const;
  std::int64_t ScaledSegment(int agent, std::size_t phase_index) const;

 private:
  void CheckAgent(int agent) const;

  int num_agents_ = 0;
  std::vector<Phase> phases_;
  bool exact_ = false;
  std::int64_t scale_ = 1;
  std::vector<std::int64_t> scaled_utility_;  // joint * n + agent
  std::vector<double> utility_;
  // cum_*[agent][t]: sum over rounds 1..t, cum[agent][0] = 0.
  std::vector<std::vector<std::int64_t>> cum_scaled_;
  std::vector<std::vector<double>> cum_;
  std::int64_t rounds_ = 0;
};

// Cumulative utility over rounds 1..up_to_t divided by up_to_t.
double AverageUtility(const UtilityLedger& ledger, int agent,
                      std::int64_t up_to_t);
// Same, restricted to free-period rounds. NoDataError when there are none.
double FreePeriodAverageUtility(const UtilityLedger& ledger, int agent,
                                std::int64_t up_to_t);

struct Transcript {
  std::uint64_t seed = 0;
  std::string config_snapshot;
  std::size_t num_joint_actions = 0;
  std::vector<Phase> phases;
  std::vector<RoundRecord> rounds;
  std::vector<DecisionRecord> decisions;
  std::vector<MixedStrategy> fallbacks;
  UtilityLedger ledger;

  // Decision of `agent` at test j, if that test finished.
  std::optional<Decision> DecisionAt(int agent, int test) const;
};

struct RunOptions {
  // Overrides the mediator's draw for round t (used by replay tests).
  std::function<JointIndex(std::int64_t t)> signal_source;
  std::string config_snapshot;
};

// Plays `rounds` rounds (the whole schedule when rounds < 0). Throws before
// round 1 on inconsistent configuration or when the schedule is too short.
Transcript RunGame(const Game& game, const CorrelatedStrategy& sigma_m,
                   const Schedule& schedule,
                   const std::vector<AgentConfig>& agents, std::uint64_t seed,
                   std::int64_t rounds = -1, const RunOptions& options = {});

// Counts from one stand-alone sampling test of `length` rounds: agents with
// a fall-back in `deviations` play it, the rest follow their signals.
std::vector<std::int64_t> SampleTestCounts(
    const CorrelatedStrategy& sigma_m,
    const std::vector<std::optional<MixedStrategy>>& deviations,
    std::int64_t length, std::uint64_t seed);

// Counts of each joint action over rounds from_t..to_t inclusive.
EmpiricalFrequency ComputeEmpiricalFrequency(const Transcript& transcript,
                                             std::int64_t from_t,
                                             std::int64_t to_t);

// (1/2) Σ |p(a) - q(a)|.
double TvDistance(std::span<const double> p, std::span<const double> q);

// Per free period j: TV distance between its empirical frequency and σ^M.
// Periods not fully played are skipped.
std::vector<double> FreePeriodTvDistances(const Transcript& transcript,
                                          const CorrelatedStrategy& sigma_m);

// Exact expected per-round joint-action distributions for pure-learner
// agents, by enumerating every history. result[t - 1][a] = P(a^t = a).
// Limited to rounds <= 12 and |A|^rounds <= 2^24.
std::vector<std::vector<double>> ExactExpectedPlay(
    const Game& game, const Schedule& schedule,
    const std::vector<AgentConfig>& agents, std::int64_t rounds);

// Applies fn to every seed on a small thread pool. Results are stored by
// position, so the output does not depend on scheduling.
template <class Fn>
auto ParallelMap(std::span<const std::uint64_t> seeds, Fn fn, int threads = 0)
    -> std::vector<decltype(fn(std::uint64_t{}))> {
  using Result = decltype(fn(std::uint64_t{}));
  std::vector<std::optional<Result>> slots(seeds.size());
  if (threads <= 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(1, seeds.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  auto worker = [&](int w) {
    try {
      for (std::size_t k = next++; k < seeds.size(); k = next++) {
        slots[k].emplace(fn(seeds[k]));
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
      next = seeds.size();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<Transcript> RunBatch(const Game& game,
                                 const CorrelatedStrategy& sigma_m,
                                 const Schedule& schedule,
                                 const std::vector<AgentConfig>& agents,
                                 std::span<const std::uint64_t> seeds,
                                 std::int64_t rounds = -1, int threads = 0);

}  // namespace cetest

#endif  // CETEST_SIM_H_
