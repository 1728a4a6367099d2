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

// Repeated testing: the timeline alternates sampling tests R_j and free
// periods F_j, R_1 starting at t = 1. Test j is planned with its own
// sensitivity δ(R_j) and error probability p(R_j); δ(R_j) should shrink to
// zero, Σ p(R_j) should converge, and the tests should become a vanishing
// fraction of the timeline while their length grows superlinearly in j.

#ifndef CETEST_SCHEDULE_H_
#define CETEST_SCHEDULE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cetest/game.h"
#include "cetest/verifier.h"

namespace cetest {

enum class PhaseKind { kSamplingTest, kFreePeriod };

struct Phase {
  PhaseKind kind = PhaseKind::kSamplingTest;
  int index = 1;             // j, 1-based
  std::int64_t begin = 1;    // first round, 1-based
  std::int64_t length = 1;

  std::int64_t last() const { return begin + length - 1; }
  bool is_test() const { return kind == PhaseKind::kSamplingTest; }
  // "R3", "F1", ...
  std::string Label() const;
};

struct DeltaRule {
  enum class Kind { kHarmonic, kGeometric, kConstant };
  Kind kind = Kind::kHarmonic;
  double scale = 1.0;  // δ(R_1)
  double ratio = 0.5;  // geometric only

  double operator()(int j) const;
  std::string Describe() const;
};

struct PRule {
  enum class Kind { kGeometric, kPower, kConstant };
  Kind kind = Kind::kGeometric;
  double first = 0.5;     // p(R_1)
  double ratio = 0.5;     // geometric
  double exponent = 2.0;  // power: first / j^exponent

  double operator()(int j) const;
  // An upper bound on Σ_j p(R_j); +inf when the series diverges.
  double SeriesBound() const;
  std::string Describe() const;
};

struct FreeLengthRule {
  enum class Kind { kPower, kLinear };
  Kind kind = Kind::kPower;
  double exponent = 2.0;  // l_F = ceil(l_R^exponent)
  double factor = 1.0;    // l_F = ceil(factor * l_R)

  std::int64_t operator()(std::int64_t test_length) const;
  std::string Describe() const;
};

// δ(R_j) = 1/j, p(R_j) = 2^-j, l_F = l_R^2 unless overridden.
struct ScheduleRules {
  DeltaRule delta;
  PRule p;
  FreeLengthRule free_length;
};

struct PhaseLocation {
  Phase phase;
  std::int64_t offset = 0;  // 0-based position inside the phase
};

class Schedule {
 public:
  Schedule() = default;
  // `free_lengths` has one entry per test, or one fewer to end the timeline
  // on the last test.
  Schedule(std::vector<TestPlan> plans, std::vector<std::int64_t> free_lengths,
           ScheduleRules rules, bool conforming);

  // R_1, F_1, R_2, F_2, ...
  const std::vector<Phase>& phases() const { return phases_; }
  // plans()[j - 1] is the plan for R_j.
  const std::vector<TestPlan>& plans() const { return plans_; }
  const TestPlan& plan(int j) const { return plans_.at(j - 1); }
  const ScheduleRules& rules() const { return rules_; }
  int num_tests() const { return static_cast<int>(plans_.size()); }
  // Last round covered by the generated phases.
  std::int64_t horizon() const;
  // False for fixed-length schedules that bypass test planning.
  bool conforming() const { return conforming_; }

  const Phase& test(int j) const { return phases_.at(2 * (j - 1)); }
  // Throws std::out_of_range when the timeline ends on R_j.
  const Phase& free_period(int j) const { return phases_.at(2 * (j - 1) + 1); }

  // The phase containing round t. Throws HorizonExceededError beyond the
  // horizon and InvalidInputError for t < 1.
  PhaseLocation Locate(std::int64_t t) const;
  // Position of that phase in phases().
  std::size_t PhaseIndex(std::int64_t t) const;

 private:
  std::vector<TestPlan> plans_;
  std::vector<Phase> phases_;
  ScheduleRules rules_;
  bool conforming_ = true;
};

// Plans R_1..R_horizon with PlanTest(p(R_j), δ(R_j)), each test seeded from
// (options.seed, j), and lays out R_j, F_j with l_F = free_length(l_R).
// Throws InfeasibleScheduleError naming the first infeasible j.
Schedule BuildSchedule(const Game& game, const CorrelatedStrategy& sigma_m,
                       const ScheduleRules& rules, int horizon_tests,
                       const PlanOptions& options = {});

// Fixed test and free-period lengths, for fast runs and literal layouts.
// Plans carry α = p(R_j), c(α), δ̂ = δ(R_j) and the β actually achieved at the
// given length; ψ is not estimated (NaN). Marked non-conforming.
Schedule BuildFixedLengthSchedule(const CorrelatedStrategy& sigma_m,
                                  const std::vector<std::int64_t>& test_lengths,
                                  const std::vector<std::int64_t>& free_lengths,
                                  const ScheduleRules& rules = {});

struct ConditionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  // Σ l_R / Σ l_F must end below this.
  double ratio_threshold = 0.1;
};

// Finite-prefix surrogates for the asymptotic growth conditions. Passing
// them is evidence, not proof.
struct ScheduleValidation {
  int prefix_tests = 0;
  bool conforming = true;
  ConditionCheck ratio_vanishes;      // Σ l_R / Σ l_F decreasing to small
  ConditionCheck superlinear_tests;   // l_R / j increasing
  ConditionCheck delta_decreasing;    // δ(R_j) strictly decreasing
  ConditionCheck p_summable;          // partial sums within the rule's bound
  std::vector<double> length_ratios;  // Σ_{j'≤j} l_R / Σ_{j'≤j} l_F

  bool all_passed() const {
    return ratio_vanishes.passed && superlinear_tests.passed &&
           delta_decreasing.passed && p_summable.passed;
  }
};

ScheduleValidation ValidateSchedule(const Schedule& schedule, int prefix_tests,
                                    const ValidationOptions& options = {});

}  // namespace cetest

#endif  // CETEST_SCHEDULE_H_
