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

// Central and noncentral chi-squared distributions, test power, and the
// sample-size solver used to plan a Pearson goodness-of-fit test.

#ifndef CETEST_CHI2_H_
#define CETEST_CHI2_H_

#include <cstdint>

namespace cetest {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x),
// accurate to about 1e-14 absolute. Series for x < a + 1, Lentz continued
// fraction otherwise.
double RegularizedGammaP(double a, double x);
double RegularizedGammaQ(double a, double x);

// P(df/2, x/2). Throws InvalidInputError for x < 0 or df < 1.
double Chi2Cdf(double x, int df);
// Upper tail 1 - Chi2Cdf(x, df), computed without cancellation.
double Chi2Sf(double x, int df);

// Smallest x with Chi2Cdf(x, df) >= p, by bracketing and bisection.
// p must lie in [0, 1).
double Chi2Quantile(double p, int df);

// Noncentral chi-squared CDF as a Poisson(ncp/2) mixture of central CDFs
// with df + 2k degrees of freedom. The series stops once the discarded
// Poisson tail mass is below kNoncentralTailMass.
inline constexpr double kNoncentralTailMass = 1e-10;
double NoncentralChi2Cdf(double x, int df, double ncp);

struct PowerQuery {
  double alpha = 0.0;
  double delta_hat = 0.0;
  // Total degrees of freedom of the test statistic.
  int df = 0;
  std::int64_t sample_size = 0;
};

// Type-2 error probability of the level-alpha test when the true effect is
// delta_hat: NoncentralChi2Cdf(c(alpha), df, sample_size * delta_hat).
double PowerBeta(const PowerQuery& q);

// Smallest l_T >= 1 with PowerBeta(alpha, delta_hat, df, l_T) <= beta_target.
// Exponential bracketing followed by binary search; beta is nonincreasing
// in l_T.
std::int64_t SampleSize(double alpha, double beta_target, double delta_hat,
                        int df);

}  // namespace cetest

#endif  // CETEST_CHI2_H_
