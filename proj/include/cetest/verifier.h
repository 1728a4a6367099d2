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

// The sampling test an agent runs against a mediator's announced correlated
// strategy σ^M:
//
//   1. If σ^M violates the agent's own correlated-equilibrium constraints,
//      reject immediately and play the fall-back strategy for the test.
//   2. Otherwise follow the signals for l_T rounds, count the joint actions,
//      and compute Pearson's statistic against σ^M. A joint action that σ^M
//      never recommends (a zero cell) refutes σ^M outright.
//   3. Reject when the statistic reaches the critical value c(α).
//
// Planning picks l_T so that both error types are at most p. The Type-2
// bound accounts for the chance ψ that a uniformly random fall-back
// strategy lands within δ̂ of σ^M, maximized over deviating subsets.

#ifndef CETEST_VERIFIER_H_
#define CETEST_VERIFIER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cetest/error.h"
#include "cetest/game.h"

namespace cetest {

// Joint actions with σ^M(a) = 0, ascending.
std::vector<JointIndex> ZeroCells(const CorrelatedStrategy& sigma);

// |A| - 1 - |ζ|.
int TotalDegreesOfFreedom(const CorrelatedStrategy& sigma);

struct PearsonResult {
  double statistic = 0.0;
  // First zero cell with a positive count, if any. The statistic is not
  // meaningful when this is set.
  std::optional<JointIndex> zero_cell_hit;

  bool zero_cell_violation() const { return zero_cell_hit.has_value(); }
};

// T = Σ_{a ∉ ζ} (X(a) - l_T σ^M(a))² / (l_T σ^M(a)).
PearsonResult PearsonStatistic(std::span<const std::int64_t> observed_counts,
                               const CorrelatedStrategy& sigma_m,
                               std::int64_t sample_size);

// δ = Σ_{a: σ^M(a) > 0} (σ̃(a) - σ^M(a))² / σ^M(a). Generic over the scalar
// so exact rational types can be used.
template <class T>
T SensitivityDelta(std::span<const T> sigma_m, std::span<const T> sigma_tilde) {
  if (sigma_m.size() != sigma_tilde.size()) {
    throw InvalidInputError("strategies have different sizes");
  }
  T delta(0);
  for (std::size_t a = 0; a < sigma_m.size(); ++a) {
    if (!(sigma_m[a] > T(0))) continue;
    const T diff = sigma_tilde[a] - sigma_m[a];
    delta += diff * diff / sigma_m[a];
  }
  return delta;
}

double SensitivityDelta(const CorrelatedStrategy& sigma_m,
                        const CorrelatedStrategy& sigma_tilde);

// Joint distribution when the agents in `deviator_mask` play `fallbacks`
// independently and the rest keep σ^M's marginal over their own actions.
std::vector<double> ComposeDeviation(const CorrelatedStrategy& sigma_m,
                                     std::uint32_t deviator_mask,
                                     std::span<const MixedStrategy> fallbacks);

struct SubsetPsi {
  std::uint32_t mask = 0;  // bit i set: agent i deviates
  double fraction = 0.0;
  double std_error = 0.0;
};

struct PsiEstimate {
  double psi = 0.0;
  // Standard error of the maximizing subset's estimate.
  double std_error = 0.0;
  std::uint32_t argmax_mask = 0;
  std::int64_t samples_per_subset = 0;
  std::vector<SubsetPsi> subsets;
};

inline constexpr int kMaxPsiAgents = 12;
inline constexpr std::int64_t kMinPsiSamples = 1000;
inline constexpr std::int64_t kDefaultPsiSamples = 200000;

// Monte Carlo estimate of ψ = max over nonempty deviating subsets N' of the
// probability that uniformly drawn fall-backs γ_{N'} give a composed strategy
// with δ < δ̂. Each subset uses its own stream seeded from (seed, mask), so
// the result does not depend on evaluation order.
PsiEstimate EstimatePsi(const Game& game, const CorrelatedStrategy& sigma_m,
                        double delta_hat, std::int64_t mc_samples,
                        std::uint64_t seed);

// Lower bound on the per-round probability that play lands in a zero cell
// when some nonempty subset falls back to uniform random strategies.
double ProbZeroCellBound(const Game& game, const CorrelatedStrategy& sigma_m);

struct TestPlan {
  double p_target = 0.0;
  double alpha = 0.0;
  double critical_value = 0.0;
  double delta_hat = 0.0;
  double psi = 0.0;
  double psi_std_error = 0.0;
  double beta = 0.0;
  std::int64_t sample_size = 0;
  std::vector<JointIndex> zero_cells;
  int df_total = 0;
  double p_zero_cell = 0.0;
};

using PsiEstimator = std::function<PsiEstimate(
    const Game&, const CorrelatedStrategy&, double delta_hat)>;

struct PlanOptions {
  std::int64_t mc_samples = kDefaultPsiSamples;
  std::uint64_t seed = 0;
  // Replaces the Monte Carlo estimate when set.
  PsiEstimator psi_estimator;
};

// α = p, c(α) = χ²-quantile at 1 - α, β = (p - ψ) / (1 - ψ), and l_T the
// smallest sample size achieving β at sensitivity δ̂. The (1 - P)^{l_T}
// zero-cell factor is dropped, which can only overstate the Type-2 error.
// Throws InfeasiblePlanError when p <= ψ.
TestPlan PlanTest(const Game& game, const CorrelatedStrategy& sigma_m,
                  double p, double delta_hat, const PlanOptions& options = {});

// A plan for deciding on a sample that is already collected: α, c(α), ζ and
// the degrees of freedom, with l_T set to the sample's size. ψ, β and P are
// not computed (NaN).
TestPlan DecisionPlan(const CorrelatedStrategy& sigma_m, double alpha,
                      std::int64_t sample_size);

enum class Outcome {
  kFollowMediator,
  kRejectByEq2,
  kRejectByZeroCell,
  kRejectByStatistic,
};

std::string OutcomeName(Outcome outcome);
inline bool IsReject(Outcome outcome) {
  return outcome != Outcome::kFollowMediator;
}

struct Decision {
  Outcome outcome = Outcome::kFollowMediator;
  std::optional<double> statistic;
  std::optional<double> p_value;
};

// One agent's decision at the end of a sampling test.
Decision RunSamplingDecision(const TestPlan& plan, const Game& game,
                             const CorrelatedStrategy& sigma_m, int agent,
                             std::span<const std::int64_t> observed_counts);

}  // namespace cetest

#endif  // CETEST_VERIFIER_H_
