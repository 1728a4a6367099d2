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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "cetest/chi2.h"
#include "cetest/error.h"
#include "cetest/rng.h"

namespace cetest {
namespace {

constexpr std::int64_t kMaxPhaseLength = std::int64_t{1} << 62;

std::string Num(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// Number of strictly decreasing steps at the end of `v`.
int DecreasingTail(const std::vector<double>& v) {
  int steps = 0;
  for (std::size_t k = v.size(); k >= 2; --k) {
    if (v[k - 1] < v[k - 2]) {
      ++steps;
    } else {
      break;
    }
  }
  return steps;
}

int IncreasingTail(const std::vector<double>& v) {
  int steps = 0;
  for (std::size_t k = v.size(); k >= 2; --k) {
    if (v[k - 1] > v[k - 2]) {
      ++steps;
    } else {
      break;
    }
  }
  return steps;
}

}  // namespace

std::string Phase::Label() const {
  return (is_test() ? "R" : "F") + std::to_string(index);
}

double DeltaRule::operator()(int j) const {
  if (j < 1) throw InvalidInputError("test index must be >= 1");
  switch (kind) {
    case Kind::kHarmonic:
      return scale / j;
    case Kind::kGeometric:
      return scale * std::pow(ratio, j - 1);
    case Kind::kConstant:
      return scale;
  }
  return scale;
}

std::string DeltaRule::Describe() const {
  switch (kind) {
    case Kind::kHarmonic:
      return "delta(R_j) = " + Num(scale) + "/j";
    case Kind::kGeometric:
      return "delta(R_j) = " + Num(scale) + "*" + Num(ratio) + "^(j-1)";
    case Kind::kConstant:
      return "delta(R_j) = " + Num(scale);
  }
  return "";
}

double PRule::operator()(int j) const {
  if (j < 1) throw InvalidInputError("test index must be >= 1");
  switch (kind) {
    case Kind::kGeometric:
      return first * std::pow(ratio, j - 1);
    case Kind::kPower:
      return first / std::pow(static_cast<double>(j), exponent);
    case Kind::kConstant:
      return first;
  }
  return first;
}

double PRule::SeriesBound() const {
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case Kind::kGeometric:
      return ratio < 1.0 ? first / (1.0 - ratio) : inf;
    case Kind::kPower:
      // Σ 1/j^s <= 1 + ∫_1^∞ x^{-s} dx for s > 1.
      return exponent > 1.0 ? first * (1.0 + 1.0 / (exponent - 1.0)) : inf;
    case Kind::kConstant:
      return first == 0.0 ? 0.0 : inf;
  }
  return inf;
}

std::string PRule::Describe() const {
  switch (kind) {
    case Kind::kGeometric:
      return "p(R_j) = " + Num(first) + "*" + Num(ratio) + "^(j-1)";
    case Kind::kPower:
      return "p(R_j) = " + Num(first) + "/j^" + Num(exponent);
    case Kind::kConstant:
      return "p(R_j) = " + Num(first);
  }
  return "";
}

std::int64_t FreeLengthRule::operator()(std::int64_t test_length) const {
  if (test_length < 1) throw InvalidInputError("test length must be >= 1");
  const double l = static_cast<double>(test_length);
  double value = 0.0;
  switch (kind) {
    case Kind::kPower:
      if (exponent == 2.0) {
        if (test_length > std::int64_t{3037000499}) {
          throw InvalidInputError("free-period length overflows");
        }
        return std::max<std::int64_t>(1, test_length * test_length);
      }
      value = std::ceil(std::pow(l, exponent));
      break;
    case Kind::kLinear:
      value = std::ceil(factor * l);
      break;
  }
  if (!(value < static_cast<double>(kMaxPhaseLength))) {
    throw InvalidInputError("free-period length overflows");
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(value));
}

std::string FreeLengthRule::Describe() const {
  switch (kind) {
    case Kind::kPower:
      return "l_F = l_R^" + Num(exponent);
    case Kind::kLinear:
      return "l_F = " + Num(factor) + "*l_R";
  }
  return "";
}

Schedule::Schedule(std::vector<TestPlan> plans,
                   std::vector<std::int64_t> free_lengths, ScheduleRules rules,
                   bool conforming)
    : plans_(std::move(plans)), rules_(rules), conforming_(conforming) {
  if (free_lengths.size() != plans_.size() &&
      free_lengths.size() + 1 != plans_.size()) {
    throw InvalidInputError(
        "need one free period per test, or one fewer to end on a test");
  }
  std::int64_t begin = 1;
  for (std::size_t k = 0; k < plans_.size(); ++k) {
    const int j = static_cast<int>(k) + 1;
    const std::int64_t test_length = plans_[k].sample_size;
    const std::int64_t free_length = k < free_lengths.size() ? free_lengths[k] : 0;
    if (test_length < 1 || (k < free_lengths.size() && free_length < 1)) {
      throw InvalidInputError("phase lengths must be >= 1");
    }
    if (begin > kMaxPhaseLength - test_length - free_length) {
      throw InvalidInputError("schedule overflows the time axis");
    }
    phases_.push_back({PhaseKind::kSamplingTest, j, begin, test_length});
    begin += test_length;
    if (k < free_lengths.size()) {
      phases_.push_back({PhaseKind::kFreePeriod, j, begin, free_length});
      begin += free_length;
    }
  }
}

std::int64_t Schedule::horizon() const {
  return phases_.empty() ? 0 : phases_.back().last();
}

std::size_t Schedule::PhaseIndex(std::int64_t t) const {
  if (t < 1) throw InvalidInputError("time index must be >= 1");
  if (t > horizon()) {
    throw HorizonExceededError("round " + std::to_string(t) +
                               " is beyond the schedule horizon " +
                               std::to_string(horizon()));
  }
  auto it = std::upper_bound(
      phases_.begin(), phases_.end(), t,
      [](std::int64_t value, const Phase& p) { return value < p.begin; });
  return static_cast<std::size_t>(std::distance(phases_.begin(), it)) - 1;
}

PhaseLocation Schedule::Locate(std::int64_t t) const {
  const Phase& phase = phases_[PhaseIndex(t)];
  return {phase, t - phase.begin};
}

Schedule BuildSchedule(const Game& game, const CorrelatedStrategy& sigma_m,
                       const ScheduleRules& rules, int horizon_tests,
                       const PlanOptions& options) {
  if (horizon_tests < 1) throw InvalidInputError("horizon must be >= 1 test");
  std::vector<TestPlan> plans;
  std::vector<std::int64_t> free_lengths;
  for (int j = 1; j <= horizon_tests; ++j) {
    PlanOptions test_options = options;
    test_options.seed = StreamSeed(options.seed, {0x7363686564ULL,
                                                  static_cast<std::uint64_t>(j)});
    const double p = rules.p(j);
    const double delta = rules.delta(j);
    try {
      plans.push_back(PlanTest(game, sigma_m, p, delta, test_options));
    } catch (const InfeasiblePlanError& e) {
      std::ostringstream msg;
      msg << "infeasible schedule at test j = " << j << ": p(R_j) = " << p
          << " <= psi = " << e.psi() << " (delta(R_j) = " << delta << ")";
      throw InfeasibleScheduleError(msg.str(), j, e.psi(), p);
    }
    free_lengths.push_back(rules.free_length(plans.back().sample_size));
  }
  return Schedule(std::move(plans), std::move(free_lengths), rules, true);
}

Schedule BuildFixedLengthSchedule(const CorrelatedStrategy& sigma_m,
                                  const std::vector<std::int64_t>& test_lengths,
                                  const std::vector<std::int64_t>& free_lengths,
                                  const ScheduleRules& rules) {
  if (test_lengths.empty() || test_lengths.size() != free_lengths.size()) {
    throw InvalidInputError(
        "fixed-length schedule needs matching, nonempty length lists");
  }
  const int df = TotalDegreesOfFreedom(sigma_m);
  if (df < 1) throw InvalidInputError("strategy has no degrees of freedom");
  std::vector<TestPlan> plans;
  for (std::size_t k = 0; k < test_lengths.size(); ++k) {
    const int j = static_cast<int>(k) + 1;
    TestPlan plan;
    plan.p_target = rules.p(j);
    plan.alpha = plan.p_target;
    plan.delta_hat = rules.delta(j);
    plan.df_total = df;
    plan.zero_cells = ZeroCells(sigma_m);
    plan.critical_value = Chi2Quantile(1.0 - plan.alpha, df);
    plan.sample_size = test_lengths[k];
    plan.psi = std::numeric_limits<double>::quiet_NaN();
    plan.psi_std_error = std::numeric_limits<double>::quiet_NaN();
    plan.p_zero_cell = std::numeric_limits<double>::quiet_NaN();
    if (plan.sample_size < 1) throw InvalidInputError("test length must be >= 1");
    plan.beta = PowerBeta({plan.alpha, plan.delta_hat, df, plan.sample_size});
    plans.push_back(std::move(plan));
  }
  return Schedule(std::move(plans), free_lengths, rules, false);
}

ScheduleValidation ValidateSchedule(const Schedule& schedule, int prefix_tests,
                                    const ValidationOptions& options) {
  if (prefix_tests < 2) throw InvalidInputError("prefix must cover >= 2 tests");
  if (prefix_tests > schedule.num_tests()) {
    throw HorizonExceededError("prefix longer than the generated schedule");
  }
  ScheduleValidation report;
  report.prefix_tests = prefix_tests;
  report.conforming = schedule.conforming();
  // A monotone tail must cover at least half of the prefix's steps.
  const int needed = std::max(1, prefix_tests / 2);

  std::vector<double> per_j;
  std::vector<double> deltas;
  double sum_r = 0.0;
  double sum_f = 0.0;
  double sum_p = 0.0;
  for (int j = 1; j <= prefix_tests; ++j) {
    const TestPlan& plan = schedule.plan(j);
    sum_r += static_cast<double>(schedule.test(j).length);
    sum_f += static_cast<double>(schedule.free_period(j).length);
    report.length_ratios.push_back(sum_r / sum_f);
    per_j.push_back(static_cast<double>(schedule.test(j).length) / j);
    deltas.push_back(plan.delta_hat);
    sum_p += plan.p_target;
  }

  {
    const int tail = DecreasingTail(report.length_ratios);
    const double last = report.length_ratios.back();
    auto& c = report.ratio_vanishes;
    c.name = "sum(l_R)/sum(l_F) decreasing toward 0";
    c.passed = tail >= needed && last < options.ratio_threshold;
    c.detail = "decreasing over the last " + std::to_string(tail) +
               " steps (need " + std::to_string(needed) + "); final ratio " +
               Num(last) + " vs threshold " + Num(options.ratio_threshold);
  }
  {
    const int tail = IncreasingTail(per_j);
    auto& c = report.superlinear_tests;
    c.name = "l_R/j increasing";
    c.passed = tail >= needed;
    c.detail = "increasing over the last " + std::to_string(tail) +
               " steps (need " + std::to_string(needed) + "); final l_R/j " +
               Num(per_j.back());
  }
  {
    const int tail = DecreasingTail(deltas);
    auto& c = report.delta_decreasing;
    c.name = "delta(R_j) strictly decreasing";
    c.passed = tail == prefix_tests - 1;
    c.detail = "strictly decreasing over " + std::to_string(tail) + " of " +
               std::to_string(prefix_tests - 1) + " steps; final delta " +
               Num(deltas.back());
  }
  {
    const double bound = schedule.rules().p.SeriesBound();
    auto& c = report.p_summable;
    c.name = "sum p(R_j) bounded";
    c.passed = std::isfinite(bound) && sum_p <= bound;
    c.detail = "partial sum " + Num(sum_p) + " vs series bound " + Num(bound);
  }
  return report;
}

}  // namespace cetest
