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

#include "cetest/verifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cetest/chi2.h"
#include "cetest/rng.h"

namespace cetest {
namespace {

void CheckSameSpace(const Game& game, const CorrelatedStrategy& sigma) {
  if (!(game.space() == sigma.space())) {
    throw InvalidInputError("strategy does not match the game's action sets");
  }
}

void CheckSubsetCount(int num_agents) {
  if (num_agents > kMaxPsiAgents) {
    throw SubsetExplosionError(
        "deviating-subset enumeration needs 2^" + std::to_string(num_agents) +
        " subsets; at most " + std::to_string(kMaxPsiAgents) +
        " agents are supported");
  }
}

// Index of the joint action with every agent in `mask` set to action 0.
JointIndex ProjectOut(const ActionSpace& space, JointIndex a,
                      std::uint32_t mask) {
  for (int i = 0; i < space.num_agents(); ++i) {
    if (mask & (1u << i)) {
      a -= static_cast<JointIndex>(space.ActionOf(a, i)) * space.stride(i);
    }
  }
  return a;
}

// For each joint action, σ^M's marginal over the agents outside `mask`.
std::vector<double> KeptMarginal(const CorrelatedStrategy& sigma,
                                 std::uint32_t mask) {
  const ActionSpace& space = sigma.space();
  std::vector<double> by_key(space.size(), 0.0);
  for (JointIndex a = 0; a < space.size(); ++a) {
    by_key[ProjectOut(space, a, mask)] += sigma[a];
  }
  std::vector<double> out(space.size());
  for (JointIndex a = 0; a < space.size(); ++a) {
    out[a] = by_key[ProjectOut(space, a, mask)];
  }
  return out;
}

std::size_t DeviatorActionCount(const ActionSpace& space, std::uint32_t mask) {
  std::size_t count = 1;
  for (int i = 0; i < space.num_agents(); ++i) {
    if (mask & (1u << i)) count *= static_cast<std::size_t>(space.action_count(i));
  }
  return count;
}

}  // namespace

std::vector<JointIndex> ZeroCells(const CorrelatedStrategy& sigma) {
  std::vector<JointIndex> cells;
  for (JointIndex a = 0; a < sigma.size(); ++a) {
    if (sigma[a] == 0.0) cells.push_back(a);
  }
  return cells;
}

int TotalDegreesOfFreedom(const CorrelatedStrategy& sigma) {
  return static_cast<int>(sigma.size()) - 1 -
         static_cast<int>(ZeroCells(sigma).size());
}

PearsonResult PearsonStatistic(std::span<const std::int64_t> observed_counts,
                               const CorrelatedStrategy& sigma_m,
                               std::int64_t sample_size) {
  if (observed_counts.size() != sigma_m.size()) {
    throw InvalidInputError("counts have " +
                            std::to_string(observed_counts.size()) +
                            " cells, expected " + std::to_string(sigma_m.size()));
  }
  if (sample_size < 1) throw InvalidInputError("sample size must be >= 1");
  std::int64_t total = 0;
  for (std::int64_t c : observed_counts) {
    if (c < 0) throw InvalidInputError("counts must be nonnegative");
    total += c;
  }
  if (total != sample_size) {
    throw InvalidInputError("counts sum to " + std::to_string(total) +
                            ", expected " + std::to_string(sample_size));
  }
  PearsonResult result;
  const double n = static_cast<double>(sample_size);
  for (JointIndex a = 0; a < sigma_m.size(); ++a) {
    if (sigma_m[a] == 0.0) {
      if (observed_counts[a] > 0 && !result.zero_cell_hit) {
        result.zero_cell_hit = a;
      }
      continue;
    }
    const double expected = n * sigma_m[a];
    const double diff = static_cast<double>(observed_counts[a]) - expected;
    result.statistic += diff * diff / expected;
  }
  return result;
}

double SensitivityDelta(const CorrelatedStrategy& sigma_m,
                        const CorrelatedStrategy& sigma_tilde) {
  if (!(sigma_m.space() == sigma_tilde.space())) {
    throw InvalidInputError("strategies live on different action spaces");
  }
  return SensitivityDelta<double>(sigma_m.probs(), sigma_tilde.probs());
}

std::vector<double> ComposeDeviation(const CorrelatedStrategy& sigma_m,
                                     std::uint32_t deviator_mask,
                                     std::span<const MixedStrategy> fallbacks) {
  const ActionSpace& space = sigma_m.space();
  if (fallbacks.size() != static_cast<std::size_t>(space.num_agents())) {
    throw InvalidInputError("need one fall-back slot per agent");
  }
  for (int i = 0; i < space.num_agents(); ++i) {
    if ((deviator_mask & (1u << i)) &&
        fallbacks[i].size() != static_cast<std::size_t>(space.action_count(i))) {
      throw InvalidInputError("fall-back for agent " + std::to_string(i) +
                              " has the wrong size");
    }
  }
  std::vector<double> composed = KeptMarginal(sigma_m, deviator_mask);
  for (JointIndex a = 0; a < space.size(); ++a) {
    for (int i = 0; i < space.num_agents(); ++i) {
      if (deviator_mask & (1u << i)) composed[a] *= fallbacks[i][space.ActionOf(a, i)];
    }
  }
  return composed;
}

PsiEstimate EstimatePsi(const Game& game, const CorrelatedStrategy& sigma_m,
                        double delta_hat, std::int64_t mc_samples,
                        std::uint64_t seed) {
  CheckSameSpace(game, sigma_m);
  if (!(delta_hat > 0.0)) throw InvalidInputError("delta_hat must be > 0");
  if (mc_samples < kMinPsiSamples) {
    throw InvalidInputError("mc_samples must be >= " +
                            std::to_string(kMinPsiSamples));
  }
  const int n = game.num_agents();
  CheckSubsetCount(n);
  const ActionSpace& space = sigma_m.space();

  std::vector<JointIndex> support;
  for (JointIndex a = 0; a < space.size(); ++a) {
    if (sigma_m[a] > 0.0) support.push_back(a);
  }

  PsiEstimate estimate;
  estimate.samples_per_subset = mc_samples;
  estimate.psi = -1.0;
  const std::uint32_t full = (1u << n) - 1u;
  std::vector<std::vector<double>> gammas(n);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const std::vector<double> kept = KeptMarginal(sigma_m, mask);
    Rng rng(StreamSeed(seed, {0x70736900ULL, mask}));
    std::int64_t hits = 0;
    for (std::int64_t s = 0; s < mc_samples; ++s) {
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) gammas[i] = UniformSimplexPoint(game.action_count(i), rng);
      }
      double delta = 0.0;
      for (JointIndex a : support) {
        double composed = kept[a];
        for (int i = 0; i < n; ++i) {
          if (mask & (1u << i)) composed *= gammas[i][space.ActionOf(a, i)];
        }
        const double diff = composed - sigma_m[a];
        delta += diff * diff / sigma_m[a];
      }
      if (delta < delta_hat) ++hits;
    }
    SubsetPsi subset;
    subset.mask = mask;
    subset.fraction = static_cast<double>(hits) / static_cast<double>(mc_samples);
    subset.std_error = std::sqrt(subset.fraction * (1.0 - subset.fraction) /
                                 static_cast<double>(mc_samples));
    if (subset.fraction > estimate.psi) {
      estimate.psi = subset.fraction;
      estimate.std_error = subset.std_error;
      estimate.argmax_mask = mask;
    }
    estimate.subsets.push_back(subset);
  }
  return estimate;
}

double ProbZeroCellBound(const Game& game, const CorrelatedStrategy& sigma_m) {
  CheckSameSpace(game, sigma_m);
  const std::vector<JointIndex> zeros = ZeroCells(sigma_m);
  if (zeros.empty()) return 0.0;
  const int n = game.num_agents();
  CheckSubsetCount(n);
  const ActionSpace& space = sigma_m.space();
  const std::uint32_t full = (1u << n) - 1u;
  double total = 0.0;
  for (JointIndex a : zeros) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const double value = MarginalExcludingMask(sigma_m, mask, a) /
                           static_cast<double>(DeviatorActionCount(space, mask));
      best = std::min(best, value);
    }
    total += best;
  }
  return std::clamp(total, 0.0, 1.0);
}

TestPlan PlanTest(const Game& game, const CorrelatedStrategy& sigma_m,
                  double p, double delta_hat, const PlanOptions& options) {
  CheckSameSpace(game, sigma_m);
  if (!(p > 0.0 && p < 1.0)) throw InvalidInputError("p must lie in (0, 1)");
  if (!(delta_hat > 0.0)) throw InvalidInputError("delta_hat must be > 0");

  TestPlan plan;
  plan.p_target = p;
  plan.alpha = p;
  plan.delta_hat = delta_hat;
  plan.zero_cells = ZeroCells(sigma_m);
  plan.df_total = TotalDegreesOfFreedom(sigma_m);
  if (plan.df_total < 1) {
    throw InvalidInputError(
        "strategy supports a single joint action; the test has no degrees of "
        "freedom");
  }
  plan.critical_value = Chi2Quantile(1.0 - plan.alpha, plan.df_total);

  const PsiEstimate psi =
      options.psi_estimator
          ? options.psi_estimator(game, sigma_m, delta_hat)
          : EstimatePsi(game, sigma_m, delta_hat, options.mc_samples,
                        options.seed);
  plan.psi = psi.psi;
  plan.psi_std_error = psi.std_error;
  if (!(plan.psi >= 0.0 && plan.psi <= 1.0)) {
    throw InvalidInputError("psi estimate outside [0, 1]");
  }
  if (p <= plan.psi) {
    std::ostringstream msg;
    msg << "infeasible plan: p = " << p << " does not exceed psi = " << plan.psi
        << " at delta_hat = " << delta_hat;
    throw InfeasiblePlanError(msg.str(), plan.psi, p);
  }
  plan.beta = (p - plan.psi) / (1.0 - plan.psi);
  plan.sample_size = SampleSize(plan.alpha, plan.beta, delta_hat, plan.df_total);
  plan.p_zero_cell = ProbZeroCellBound(game, sigma_m);
  return plan;
}

TestPlan DecisionPlan(const CorrelatedStrategy& sigma_m, double alpha,
                      std::int64_t sample_size) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInputError("alpha must lie in (0, 1)");
  }
  if (sample_size < 1) throw InvalidInputError("sample size must be >= 1");
  TestPlan plan;
  plan.p_target = alpha;
  plan.alpha = alpha;
  plan.zero_cells = ZeroCells(sigma_m);
  plan.df_total = TotalDegreesOfFreedom(sigma_m);
  if (plan.df_total < 1) {
    throw InvalidInputError("the test has no degrees of freedom");
  }
  plan.critical_value = Chi2Quantile(1.0 - alpha, plan.df_total);
  plan.sample_size = sample_size;
  plan.delta_hat = std::numeric_limits<double>::quiet_NaN();
  plan.psi = std::numeric_limits<double>::quiet_NaN();
  plan.psi_std_error = std::numeric_limits<double>::quiet_NaN();
  plan.beta = std::numeric_limits<double>::quiet_NaN();
  plan.p_zero_cell = std::numeric_limits<double>::quiet_NaN();
  return plan;
}

std::string OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kFollowMediator:
      return "FollowMediator";
    case Outcome::kRejectByEq2:
      return "RejectByEq2";
    case Outcome::kRejectByZeroCell:
      return "RejectByZeroCell";
    case Outcome::kRejectByStatistic:
      return "RejectByStatistic";
  }
  return "Unknown";
}

Decision RunSamplingDecision(const TestPlan& plan, const Game& game,
                             const CorrelatedStrategy& sigma_m, int agent,
                             std::span<const std::int64_t> observed_counts) {
  CheckSameSpace(game, sigma_m);
  if (agent < 0 || agent >= game.num_agents()) {
    throw InvalidInputError("agent index out of range");
  }
  const PearsonResult pearson =
      PearsonStatistic(observed_counts, sigma_m, plan.sample_size);

  Decision decision;
  if (!SatisfiesCeConstraints(game, sigma_m, agent)) {
    decision.outcome = Outcome::kRejectByEq2;
    return decision;
  }
  if (pearson.zero_cell_violation()) {
    decision.outcome = Outcome::kRejectByZeroCell;
    return decision;
  }
  decision.statistic = pearson.statistic;
  decision.p_value = Chi2Sf(pearson.statistic, plan.df_total);
  decision.outcome = pearson.statistic >= plan.critical_value
                         ? Outcome::kRejectByStatistic
                         : Outcome::kFollowMediator;
  return decision;
}

}  // namespace cetest
