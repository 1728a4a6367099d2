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

#include <gtest/gtest.h>

#include "cetest/error.h"
#include "fixtures.h"

namespace cetest {
namespace {

PhaseLocation At(PhaseKind kind, std::int64_t offset) {
  return {Phase{kind, 1, 1, 10}, offset};
}

TEST(FallbackTest, DeterministicAndOnTheSimplex) {
  const MixedStrategy a = DrawFallback(3, 42);
  EXPECT_EQ(a, DrawFallback(3, 42));
  EXPECT_NE(a, DrawFallback(3, 43));
  double sum = 0;
  for (double v : a.probs()) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(DrawFallback(1, 5), MixedStrategy({1.0}));
}

TEST(FallbackTest, UniformOnTheSimplex) {
  // For k = 2 the first coordinate is uniform on [0, 1].
  int below = 0;
  const int n = 20000;
  for (int s = 0; s < n; ++s) below += DrawFallback(2, s)[0] < 0.3;
  EXPECT_NEAR(static_cast<double>(below) / n, 0.3, 0.015);
}

TEST(FictitiousPlayTest, BestRespondsToEmpiricalMarginal) {
  const Game g = fixtures::Game2x2();
  FictitiousPlayLearner row(g, 0);
  EXPECT_EQ(row.NextStrategy(), MixedStrategy::Uniform(2));
  // Column mostly a_{2,1}: row prefers a_{1,2} (5 vs 0).
  row.Observe(g.space().Index(std::vector<int>{0, 0}));
  EXPECT_EQ(row.NextStrategy(), MixedStrategy::Pure(2, 1));
  for (int k = 0; k < 6; ++k) row.Observe(g.space().Index(std::vector<int>{0, 1}));
  // Column mostly a_{2,2}: a_{1,1} earns 12/7, a_{1,2} earns 11/7.
  EXPECT_EQ(row.NextStrategy(), MixedStrategy::Pure(2, 0));
  row.Reset();
  EXPECT_EQ(row.NextStrategy(), MixedStrategy::Uniform(2));
}

TEST(FictitiousPlayTest, TiesGoToLowestAction) {
  const Game g({2, 2}, {1, 1, 1, 1, 1, 1, 1, 1});
  FictitiousPlayLearner l(g, 1);
  l.Observe(0);
  EXPECT_EQ(l.NextStrategy(), MixedStrategy::Pure(2, 0));
}

TEST(TriggerTest, SwitchesAndResets) {
  const Game g = fixtures::Game2x2();
  TriggerLearner t(g, 0, 0, 1, 1, 1);
  EXPECT_EQ(t.NextStrategy(), MixedStrategy::Pure(2, 0));
  t.Observe(g.space().Index(std::vector<int>{0, 0}));
  EXPECT_EQ(t.NextStrategy(), MixedStrategy::Pure(2, 0));
  t.Observe(g.space().Index(std::vector<int>{0, 1}));
  EXPECT_EQ(t.NextStrategy(), MixedStrategy::Pure(2, 1));
  t.Reset();
  EXPECT_EQ(t.NextStrategy(), MixedStrategy::Pure(2, 0));
}

TEST(MakeLearnerTest, NamesAndErrors) {
  const Game g = fixtures::Game2x2();
  EXPECT_EQ(MakeLearner({"uniform", {}}, g, 0)->name(), "uniform");
  EXPECT_EQ(MakeLearner({"fictitious-play", {}}, g, 1)->name(), "fictitious-play");
  EXPECT_EQ(MakeLearner({"trigger",
                         {{"action", 0}, {"opponent", 1}, {"opponent_action", 1},
                          {"switch_action", 1}}},
                        g, 0)
                ->name(),
            "trigger");
  EXPECT_THROW(MakeLearner({"trigger", {}}, g, 0), InvalidInputError);
  EXPECT_THROW(MakeLearner({"regret-matching", {}}, g, 0), InvalidInputError);
  EXPECT_THROW(MakeLearner({"uniform", {}}, g, 2), InvalidInputError);
}

TEST(AgentActTest, ModeTable) {
  const Game g = fixtures::Game2x2();
  AgentState s(0, MixedStrategy::Pure(2, 1),
               std::make_unique<TriggerLearner>(g, 0, 0, 1, 1, 1));
  Rng rng(1);
  EXPECT_EQ(AgentAct(s, At(PhaseKind::kSamplingTest, 3), 0, rng), 0);
  EXPECT_EQ(AgentAct(s, At(PhaseKind::kFreePeriod, 3), 0, rng), 0);
  EXPECT_THROW(AgentAct(s, At(PhaseKind::kFreePeriod, 3), std::nullopt, rng),
               InvalidInputError);
  s.set_mode(AgentMode::kRejectedByTest);
  // Fall-back inside a test, learner inside a free period.
  EXPECT_EQ(AgentAct(s, At(PhaseKind::kSamplingTest, 3), 0, rng), 1);
  EXPECT_EQ(AgentAct(s, At(PhaseKind::kFreePeriod, 3), 1, rng), 0);
  s.set_mode(AgentMode::kRejectedByEq2);
  EXPECT_EQ(AgentAct(s, At(PhaseKind::kSamplingTest, 0), 0, rng), 1);
}

TEST(AgentActTest, LearnerResetsAtFreePeriodStart) {
  const Game g = fixtures::Game2x2();
  AgentState s(0, MixedStrategy::Pure(2, 1),
               std::make_unique<TriggerLearner>(g, 0, 0, 1, 1, 1),
               AgentPolicy::kPureLearner);
  s.learner().Observe(g.space().Index(std::vector<int>{0, 1}));
  Rng rng(1);
  EXPECT_EQ(AgentAct(s, At(PhaseKind::kSamplingTest, 4), std::nullopt, rng), 1);
  EXPECT_EQ(AgentAct(s, At(PhaseKind::kFreePeriod, 1), std::nullopt, rng), 1);
  EXPECT_EQ(AgentAct(s, At(PhaseKind::kFreePeriod, 0), std::nullopt, rng), 0);
}

TEST(AgentStateTest, CopiesAreIndependent) {
  const Game g = fixtures::Game2x2();
  AgentState a(0, MixedStrategy::Uniform(2),
               std::make_unique<TriggerLearner>(g, 0, 0, 1, 1, 1));
  AgentState b = a;
  b.learner().Observe(g.space().Index(std::vector<int>{0, 1}));
  EXPECT_EQ(a.learner().NextStrategy(), MixedStrategy::Pure(2, 0));
  EXPECT_EQ(b.learner().NextStrategy(), MixedStrategy::Pure(2, 1));
}

}  // namespace
}  // namespace cetest
