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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cetest/chi2.h"
#include "cetest/error.h"
#include "fixtures.h"

namespace cetest {
namespace {

std::vector<AgentConfig> Lambda(int n, const std::string& learner = "uniform") {
  std::vector<AgentConfig> out(static_cast<std::size_t>(n));
  for (auto& a : out) a.learner.name = learner;
  return out;
}

bool SameTranscript(const Transcript& a, const Transcript& b) {
  if (a.rounds.size() != b.rounds.size()) return false;
  for (std::size_t k = 0; k < a.rounds.size(); ++k) {
    if (a.rounds[k].t != b.rounds[k].t || a.rounds[k].signal != b.rounds[k].signal ||
        a.rounds[k].action != b.rounds[k].action || a.rounds[k].phase != b.rounds[k].phase) {
      return false;
    }
  }
  if (a.decisions.size() != b.decisions.size()) return false;
  for (std::size_t k = 0; k < a.decisions.size(); ++k) {
    const Decision& x = a.decisions[k].decision;
    const Decision& y = b.decisions[k].decision;
    if (a.decisions[k].agent != b.decisions[k].agent ||
        a.decisions[k].test != b.decisions[k].test || x.outcome != y.outcome ||
        x.statistic != y.statistic || x.p_value != y.p_value) {
      return false;
    }
  }
  return a.fallbacks == b.fallbacks;
}

TEST(RunGameTest, ZeroRoundsGivesEmptyTranscript) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example1(g), {10}, {10});
  const Transcript tr = RunGame(g, fixtures::Example1(g), s, Lambda(2), 1, 0);
  EXPECT_TRUE(tr.rounds.empty());
  EXPECT_TRUE(tr.decisions.empty());
  EXPECT_EQ(tr.ledger.rounds(), 0);
}

TEST(RunGameTest, ConfigurationErrorsBeforeRoundOne) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example1(g), {10}, {10});
  EXPECT_THROW(RunGame(g, fixtures::Example1(g), s, Lambda(2), 1, 21),
               HorizonExceededError);
  EXPECT_THROW(RunGame(g, fixtures::Example1(g), s, Lambda(3), 1, 5), InvalidInputError);
  auto agents = Lambda(2);
  agents[0].fallback = MixedStrategy::Uniform(3);
  EXPECT_THROW(RunGame(g, fixtures::Example1(g), s, agents, 1, 5), InvalidInputError);
  agents = Lambda(2, "no-such-learner");
  EXPECT_THROW(RunGame(g, fixtures::Example1(g), s, agents, 1, 5), InvalidInputError);
  const Game other({3, 2}, std::vector<double>(12, 1.0));
  EXPECT_THROW(RunGame(other, fixtures::Example1(g), s, Lambda(2), 1, 5),
               InvalidInputError);
}

TEST(RunGameTest, ReproducibleForAFixedSeed) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example2(g), {50, 80}, {300, 600});
  const auto agents = Lambda(2, "fictitious-play");
  const Transcript a = RunGame(g, fixtures::Example2(g), s, agents, 77);
  const Transcript b = RunGame(g, fixtures::Example2(g), s, agents, 77);
  const Transcript c = RunGame(g, fixtures::Example2(g), s, agents, 78);
  EXPECT_TRUE(SameTranscript(a, b));
  EXPECT_FALSE(SameTranscript(a, c));
}

TEST(RunGameTest, FollowingAgentsReproduceTheMediator) {
  const Game g = fixtures::Game2x2();
  const CorrelatedStrategy m = fixtures::Example1(g);
  const Schedule s = BuildFixedLengthSchedule(m, {2100}, {1});
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const Transcript tr = RunGame(g, m, s, Lambda(2), seed, 2100);
    for (const RoundRecord& r : tr.rounds) ASSERT_EQ(r.signal, r.action);
    const auto f = ComputeEmpiricalFrequency(tr, 1, 2100).Distribution();
    EXPECT_LT(TvDistance(f, m.probs()), 0.05) << seed;
  }
}

TEST(RunGameTest, ViolatingAgentRejectsBeforeSampling) {
  const Game g = fixtures::Game2x2();
  const CorrelatedStrategy m = fixtures::Example2(g);
  const Schedule s = BuildFixedLengthSchedule(m, {200}, {10});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Transcript tr = RunGame(g, m, s, Lambda(2), seed);
    ASSERT_TRUE(tr.DecisionAt(1, 1).has_value());
    EXPECT_EQ(tr.DecisionAt(1, 1)->outcome, Outcome::kRejectByEq2);
  }
}

TEST(RunGameTest, SignalPrivacy) {
  const Game g = fixtures::Game2x2();
  const CorrelatedStrategy m = fixtures::Example2(g);
  const Schedule s = BuildFixedLengthSchedule(m, {300}, {10});
  const ActionSpace& space = g.space();
  const Transcript base = RunGame(g, m, s, Lambda(2), 5, 300);
  for (int focal : {0, 1}) {
    const int other = 1 - focal;
    RunOptions options;
    options.signal_source = [&](std::int64_t t) {
      const JointIndex sig = base.rounds[static_cast<std::size_t>(t - 1)].signal;
      return space.WithAction(sig, other, 1 - space.ActionOf(sig, other));
    };
    const Transcript replay = RunGame(g, m, s, Lambda(2), 5, 300, options);
    for (std::size_t k = 0; k < base.rounds.size(); ++k) {
      ASSERT_EQ(space.ActionOf(replay.rounds[k].action, focal),
                space.ActionOf(base.rounds[k].action, focal))
          << "focal " << focal << " round " << k + 1;
    }
  }
}

TEST(RunGameTest, MultinomialGoodnessOfFit) {
  const Game g = fixtures::Game2x2();
  const CorrelatedStrategy m = fixtures::Example1(g);
  const Schedule s = BuildFixedLengthSchedule(m, {600}, {1});
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Transcript tr = RunGame(g, m, s, Lambda(2), seed, 600);
    const EmpiricalFrequency f = ComputeEmpiricalFrequency(tr, 1, 600);
    double t = 0;
    for (std::size_t a = 0; a < 4; ++a) {
      const double e = 600 * m[a];
      t += (static_cast<double>(f.counts[a]) - e) * (static_cast<double>(f.counts[a]) - e) / e;
    }
    failures += Chi2Sf(t, 3) < 0.001;
  }
  EXPECT_LE(failures, 2);
}

TEST(LedgerTest, SegmentsPartitionTheTotalExactly) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example2(g), {40, 60}, {100, 150});
  const Transcript tr = RunGame(g, fixtures::Example2(g), s, Lambda(2, "fictitious-play"), 3);
  ASSERT_TRUE(tr.ledger.exact());
  for (int i = 0; i < 2; ++i) {
    std::int64_t sum = 0;
    for (std::size_t k = 0; k < tr.phases.size(); ++k) sum += tr.ledger.ScaledSegment(i, k);
    EXPECT_EQ(sum, tr.ledger.ScaledCumulative(i, tr.ledger.rounds()));
    double direct = 0;
    for (const RoundRecord& r : tr.rounds) direct += g.utility(r.action, i);
    EXPECT_EQ(tr.ledger.Total(i), direct);
    for (std::size_t k = 0; k < tr.phases.size(); ++k) EXPECT_GE(tr.ledger.Segment(i, k), 0.0);
  }
}

TEST(LedgerTest, RationalAndIrrationalUtilities) {
  const Game thirds({2}, {1.0 / 3, 2.0 / 7});
  UtilityLedger exact(thirds, {Phase{PhaseKind::kSamplingTest, 1, 1, 3}});
  EXPECT_TRUE(exact.exact());
  EXPECT_EQ(exact.scale(), 21);
  exact.Record(0);
  exact.Record(1);
  exact.Record(0);
  EXPECT_EQ(exact.ScaledCumulative(0, 3), 7 + 6 + 7);
  const Game irrational({2}, {std::sqrt(2.0), 1.0});
  UtilityLedger approx(irrational, {Phase{PhaseKind::kSamplingTest, 1, 1, 2}});
  EXPECT_FALSE(approx.exact());
  approx.Record(0);
  approx.Record(1);
  EXPECT_NEAR(approx.Total(0), std::sqrt(2.0) + 1.0, 1e-15);
}

TEST(AverageUtilityTest, ConstantAndErrors) {
  const Game flat({2, 2}, std::vector<double>(8, 3.0));
  const CorrelatedStrategy u(flat.space(), {0.25, 0.25, 0.25, 0.25});
  const Schedule s = BuildFixedLengthSchedule(u, {5}, {5});
  const Transcript tr = RunGame(flat, u, s, Lambda(2), 1);
  EXPECT_EQ(AverageUtility(tr.ledger, 0, 10), 3.0);
  EXPECT_EQ(FreePeriodAverageUtility(tr.ledger, 1, 10), 3.0);
  EXPECT_THROW(AverageUtility(tr.ledger, 0, 0), InvalidInputError);
  EXPECT_THROW(AverageUtility(tr.ledger, 0, 11), InvalidInputError);
  EXPECT_THROW(FreePeriodAverageUtility(tr.ledger, 0, 5), NoDataError);
  const Schedule only_test(s.plans(), {}, s.rules(), false);
  const Transcript t2 = RunGame(flat, u, only_test, Lambda(2), 1);
  EXPECT_THROW(FreePeriodAverageUtility(t2.ledger, 0, 5), NoDataError);
}

TEST(EmpiricalFrequencyTest, WindowsAndAdditivity) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example1(g), {30}, {30});
  const Transcript tr = RunGame(g, fixtures::Example1(g), s, Lambda(2), 9);
  const EmpiricalFrequency one = ComputeEmpiricalFrequency(tr, 7, 7);
  EXPECT_EQ(one.total, 1);
  EXPECT_EQ(one.counts[tr.rounds[6].action], 1);
  const EmpiricalFrequency all = ComputeEmpiricalFrequency(tr, 1, 60);
  EXPECT_EQ(std::accumulate(all.counts.begin(), all.counts.end(), std::int64_t{0}), 60);
  const auto x = ComputeEmpiricalFrequency(tr, 3, 20);
  const auto y = ComputeEmpiricalFrequency(tr, 21, 44);
  const auto z = ComputeEmpiricalFrequency(tr, 3, 44);
  for (std::size_t a = 0; a < 4; ++a) EXPECT_EQ(x.counts[a] + y.counts[a], z.counts[a]);
  EXPECT_THROW(ComputeEmpiricalFrequency(tr, 0, 5), InvalidInputError);
  EXPECT_THROW(ComputeEmpiricalFrequency(tr, 5, 4), InvalidInputError);
  EXPECT_THROW(ComputeEmpiricalFrequency(tr, 5, 61), InvalidInputError);
}

TEST(TvDistanceTest, Examples) {
  const std::vector<double> p{0.5, 0.5, 0, 0}, q{0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(TvDistance(p, p), 0.0);
  EXPECT_DOUBLE_EQ(TvDistance(p, q), 0.5);
  const std::vector<double> e0{1, 0}, e1{0, 1};
  EXPECT_EQ(TvDistance(e0, e1), 1.0);
  EXPECT_THROW(TvDistance(p, e0), InvalidInputError);
}

TEST(BatchTest, IndependentOfThreadCount) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example2(g), {40}, {200});
  const std::vector<std::uint64_t> seeds{5, 1, 9, 33, 2, 8, 13};
  const auto agents = Lambda(2, "fictitious-play");
  const auto one = RunBatch(g, fixtures::Example2(g), s, agents, seeds, -1, 1);
  const auto four = RunBatch(g, fixtures::Example2(g), s, agents, seeds, -1, 4);
  ASSERT_EQ(one.size(), seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    EXPECT_EQ(one[k].seed, seeds[k]);
    EXPECT_TRUE(SameTranscript(one[k], four[k]));
    EXPECT_TRUE(SameTranscript(one[k], RunGame(g, fixtures::Example2(g), s, agents, seeds[k])));
  }
}

TEST(SampleTestCountsTest, DeviationProfile) {
  const Game g = fixtures::Game2x2();
  const std::vector<std::optional<MixedStrategy>> dev{std::nullopt, MixedStrategy({0.75, 0.25})};
  const auto counts = SampleTestCounts(fixtures::Example2(g), dev, 21000, 4);
  const std::vector<double> expected{0.5, 1.0 / 6, 0.25, 1.0 / 12};
  for (std::size_t a = 0; a < 4; ++a) {
    EXPECT_NEAR(static_cast<double>(counts[a]) / 21000, expected[a], 0.015);
  }
}

TEST(ExactExpectedPlayTest, MatchesSimulation) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example1(g), {2, 1}, {3, 2});
  std::vector<AgentConfig> agents(2);
  for (auto& a : agents) {
    a.policy = AgentPolicy::kPureLearner;
    a.learner.name = "fictitious-play";
  }
  const auto exact = ExactExpectedPlay(g, s, agents, 8);
  ASSERT_EQ(exact.size(), 8u);
  for (const auto& row : exact) {
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
  }
  const int runs = 20000;
  std::vector<std::vector<double>> freq(8, std::vector<double>(4, 0.0));
  for (int seed = 0; seed < runs; ++seed) {
    const Transcript tr = RunGame(g, fixtures::Example1(g), s, agents, seed);
    for (std::size_t t = 0; t < 8; ++t) freq[t][tr.rounds[t].action] += 1.0 / runs;
  }
  for (std::size_t t = 0; t < 8; ++t) {
    for (std::size_t a = 0; a < 4; ++a) {
      const double se = std::sqrt(std::max(exact[t][a] * (1 - exact[t][a]), 1e-6) / runs);
      EXPECT_NEAR(freq[t][a], exact[t][a], 5 * se) << "t=" << t + 1 << " a=" << a;
    }
  }
  EXPECT_THROW(ExactExpectedPlay(g, s, agents, 13), InvalidInputError);
  EXPECT_THROW(ExactExpectedPlay(g, s, Lambda(2), 4), InvalidInputError);
}

}  // namespace
}  // namespace cetest
