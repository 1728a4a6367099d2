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

#include "cetest/schedule.h"

#include <gtest/gtest.h>

#include <cmath>

#include "cetest/error.h"
#include "fixtures.h"

namespace cetest {
namespace {

PlanOptions FastOptions() {
  PlanOptions o;
  o.mc_samples = 20000;
  o.seed = 11;
  return o;
}

TEST(RulesTest, Defaults) {
  const ScheduleRules r;
  EXPECT_EQ(r.delta(1), 1.0);
  EXPECT_EQ(r.delta(4), 0.25);
  EXPECT_EQ(r.p(1), 0.5);
  EXPECT_EQ(r.p(3), 0.125);
  EXPECT_EQ(r.free_length(7), 49);
  EXPECT_LE(r.p.SeriesBound(), 1.0);
}

TEST(RulesTest, AlternativeKinds) {
  DeltaRule geometric{DeltaRule::Kind::kGeometric, 0.8, 0.5};
  EXPECT_DOUBLE_EQ(geometric(3), 0.2);
  PRule power{PRule::Kind::kPower, 0.3, 0.5, 2.0};
  EXPECT_DOUBLE_EQ(power(2), 0.075);
  EXPECT_TRUE(std::isfinite(power.SeriesBound()));
  PRule constant{PRule::Kind::kConstant, 0.1, 0.5, 2.0};
  EXPECT_TRUE(std::isinf(constant.SeriesBound()));
  FreeLengthRule linear{FreeLengthRule::Kind::kLinear, 2.0, 3.5};
  EXPECT_EQ(linear(10), 35);
}

TEST(ScheduleTest, LiteralLayout) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example1(g), {1, 2}, {2, 2});
  EXPECT_FALSE(s.conforming());
  EXPECT_EQ(s.test(2).begin, 4);
  EXPECT_EQ(s.test(2).length, 2);
  EXPECT_EQ(s.free_period(1).begin, 2);
  EXPECT_EQ(s.free_period(1).length, 2);
  EXPECT_EQ(s.horizon(), 7);
  EXPECT_EQ(s.Locate(5).phase.Label(), "R2");
  EXPECT_EQ(s.Locate(5).offset, 1);
  EXPECT_EQ(s.Locate(3).phase.Label(), "F1");
  EXPECT_THROW(s.Locate(8), HorizonExceededError);
  EXPECT_THROW(s.Locate(0), InvalidInputError);
  EXPECT_TRUE(std::isnan(s.plan(1).psi));
}

TEST(ScheduleTest, PhasesTileTheTimeline) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildSchedule(g, fixtures::Correlated(g), {}, 5, FastOptions());
  std::int64_t next = 1;
  for (const Phase& ph : s.phases()) {
    EXPECT_EQ(ph.begin, next);
    EXPECT_GE(ph.length, 1);
    next = ph.last() + 1;
  }
  EXPECT_EQ(s.horizon(), next - 1);
  for (int j = 1; j <= 5; ++j) {
    EXPECT_EQ(s.test(j).length, s.plan(j).sample_size);
    EXPECT_EQ(s.free_period(j).length, s.test(j).length * s.test(j).length);
    EXPECT_DOUBLE_EQ(s.plan(j).delta_hat, 1.0 / j);
    EXPECT_DOUBLE_EQ(s.plan(j).p_target, std::ldexp(1.0, -j));
  }
  EXPECT_TRUE(s.conforming());
}

TEST(ScheduleTest, EndsOnATest) {
  const Game g = fixtures::Game2x2();
  const Schedule full = BuildFixedLengthSchedule(fixtures::Example1(g), {5}, {9});
  const Schedule s(full.plans(), {}, full.rules(), false);
  EXPECT_EQ(s.phases().size(), 1u);
  EXPECT_EQ(s.horizon(), 5);
  EXPECT_THROW(Schedule(full.plans(), {0}, full.rules(), false), InvalidInputError);
}

TEST(ScheduleTest, InfeasibleNamesTheTest) {
  const Game g = fixtures::Game2x2();
  try {
    BuildSchedule(g, fixtures::Example1(g), {}, 3, FastOptions());
    FAIL() << "expected an infeasible schedule";
  } catch (const InfeasibleScheduleError& e) {
    EXPECT_EQ(e.test_index(), 1);
    EXPECT_GT(e.psi(), 0.5);
  }
}

TEST(ValidateTest, DefaultRulesPassOnCorrelatedMediator) {
  const Game g = fixtures::Game2x2();
  const Schedule s = BuildSchedule(g, fixtures::Correlated(g), {}, 5, FastOptions());
  const ScheduleValidation v = ValidateSchedule(s, 5);
  EXPECT_TRUE(v.ratio_vanishes.passed) << v.ratio_vanishes.detail;
  EXPECT_TRUE(v.superlinear_tests.passed) << v.superlinear_tests.detail;
  EXPECT_TRUE(v.delta_decreasing.passed) << v.delta_decreasing.detail;
  EXPECT_TRUE(v.p_summable.passed) << v.p_summable.detail;
  EXPECT_EQ(v.length_ratios.size(), 5u);
}

TEST(ValidateTest, FailuresAreDetected) {
  const Game g = fixtures::Game2x2();
  ScheduleRules flat;
  flat.delta.kind = DeltaRule::Kind::kConstant;
  flat.p.kind = PRule::Kind::kConstant;
  flat.free_length = {FreeLengthRule::Kind::kLinear, 2.0, 1.0};
  const Schedule s = BuildFixedLengthSchedule(fixtures::Example1(g), {10, 10, 10, 10},
                                              {10, 10, 10, 10}, flat);
  const ScheduleValidation v = ValidateSchedule(s, 4);
  EXPECT_FALSE(v.ratio_vanishes.passed);
  EXPECT_FALSE(v.superlinear_tests.passed);
  EXPECT_FALSE(v.delta_decreasing.passed);
  EXPECT_FALSE(v.p_summable.passed);
  EXPECT_FALSE(v.all_passed());
  EXPECT_THROW(ValidateSchedule(s, 1), InvalidInputError);
  EXPECT_THROW(ValidateSchedule(s, 5), HorizonExceededError);
}

}  // namespace
}  // namespace cetest
