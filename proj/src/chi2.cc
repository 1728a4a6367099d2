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

#include "cetest/chi2.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cetest/error.h"

namespace cetest {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 1000000;
constexpr double kTiny = 1e-300;

// Σ_n x^n / (a (a+1) ... (a+n)), times the prefactor.
double GammaPSeries(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("incomplete gamma series did not converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double GammaQContinuedFraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

void CheckGammaArgs(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw InvalidInputError("incomplete gamma needs a > 0 and x >= 0");
  }
}

void CheckChi2Args(double x, int df) {
  if (!(x >= 0.0)) throw InvalidInputError("chi-squared argument must be >= 0");
  if (df < 1) throw InvalidInputError("degrees of freedom must be >= 1");
}

void CheckProbability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInputError(std::string(name) + " must lie in (0, 1)");
  }
}

double BetaAtCritical(double critical, int df, double ncp) {
  return NoncentralChi2Cdf(critical, df, ncp);
}

}  // namespace

double RegularizedGammaP(double a, double x) {
  CheckGammaArgs(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::clamp(GammaPSeries(a, x), 0.0, 1.0);
  return std::clamp(1.0 - GammaQContinuedFraction(a, x), 0.0, 1.0);
}

double RegularizedGammaQ(double a, double x) {
  CheckGammaArgs(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - GammaPSeries(a, x), 0.0, 1.0);
  return std::clamp(GammaQContinuedFraction(a, x), 0.0, 1.0);
}

double Chi2Cdf(double x, int df) {
  CheckChi2Args(x, df);
  return RegularizedGammaP(0.5 * df, 0.5 * x);
}

double Chi2Sf(double x, int df) {
  CheckChi2Args(x, df);
  return RegularizedGammaQ(0.5 * df, 0.5 * x);
}

double Chi2Quantile(double p, int df) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw InvalidInputError("quantile probability must lie in [0, 1)");
  }
  if (df < 1) throw InvalidInputError("degrees of freedom must be >= 1");
  if (p == 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(df));
  while (Chi2Cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::runtime_error("quantile bracket overflow");
  }
  // Invariant: cdf(lo) < p <= cdf(hi).
  for (int iter = 0; iter < 400 && hi - lo > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (Chi2Cdf(mid, df) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double NoncentralChi2Cdf(double x, int df, double ncp) {
  CheckChi2Args(x, df);
  if (!(ncp >= 0.0) || !std::isfinite(ncp)) {
    throw InvalidInputError("noncentrality must be finite and >= 0");
  }
  if (ncp == 0.0) return Chi2Cdf(x, df);
  if (x == 0.0) return 0.0;

  const double lambda = 0.5 * ncp;
  const double log_lambda = std::log(lambda);
  auto log_weight = [&](double k) {
    return -lambda + k * log_lambda - std::lgamma(k + 1.0);
  };
  auto term = [&](std::int64_t k, double w) {
    return w * RegularizedGammaP(0.5 * df + static_cast<double>(k), 0.5 * x);
  };

  // Sum outward from the Poisson mode so large noncentralities do not start
  // in the underflowed left tail.
  const std::int64_t mode = static_cast<std::int64_t>(std::floor(lambda));
  double w_mode = std::exp(log_weight(static_cast<double>(mode)));
  double mass = w_mode;
  double sum = term(mode, w_mode);
  std::int64_t lo = mode;
  std::int64_t hi = mode;
  double w_lo = w_mode;
  double w_hi = w_mode;
  const std::int64_t max_terms = 100000000;
  for (std::int64_t n = 0; 1.0 - mass >= kNoncentralTailMass; ++n) {
    if (n > max_terms) {
      throw std::runtime_error("noncentral chi-squared series did not converge");
    }
    const double next_lo = lo > 0 ? w_lo * static_cast<double>(lo) / lambda : 0.0;
    const double next_hi = w_hi * lambda / static_cast<double>(hi + 1);
    if (lo > 0 && next_lo >= next_hi) {
      --lo;
      w_lo = next_lo;
      mass += w_lo;
      sum += term(lo, w_lo);
    } else {
      ++hi;
      w_hi = next_hi;
      mass += w_hi;
      sum += term(hi, w_hi);
    }
    if (next_hi == 0.0 && (lo == 0 || next_lo == 0.0)) break;
  }
  // The neglected Poisson mass bounds the truncation error since every
  // central CDF is at most 1.
  if (!(1.0 - mass < kNoncentralTailMass)) {
    throw std::logic_error("noncentral chi-squared truncation bound violated");
  }
  return std::clamp(sum, 0.0, 1.0);
}

double PowerBeta(const PowerQuery& q) {
  CheckProbability(q.alpha, "alpha");
  if (!(q.delta_hat > 0.0)) throw InvalidInputError("delta_hat must be > 0");
  if (q.df < 1) throw InvalidInputError("degrees of freedom must be >= 1");
  if (q.sample_size < 1) throw InvalidInputError("sample size must be >= 1");
  const double critical = Chi2Quantile(1.0 - q.alpha, q.df);
  return BetaAtCritical(critical, q.df,
                        static_cast<double>(q.sample_size) * q.delta_hat);
}

std::int64_t SampleSize(double alpha, double beta_target, double delta_hat,
                        int df) {
  CheckProbability(alpha, "alpha");
  CheckProbability(beta_target, "beta");
  if (!(delta_hat > 0.0)) throw InvalidInputError("delta_hat must be > 0");
  if (df < 1) throw InvalidInputError("degrees of freedom must be >= 1");
  const double critical = Chi2Quantile(1.0 - alpha, df);
  auto beta = [&](std::int64_t n) {
    return BetaAtCritical(critical, df, static_cast<double>(n) * delta_hat);
  };
  if (beta(1) <= beta_target) return 1;
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (beta(hi) > beta_target) {
    lo = hi;
    if (hi > (std::int64_t{1} << 50)) {
      throw std::runtime_error("sample size exceeds 2^50");
    }
    hi *= 2;
  }
  // Invariant: beta(lo) > target >= beta(hi).
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (beta(mid) <= beta_target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace cetest
