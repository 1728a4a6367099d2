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

#ifndef CETEST_RNG_H_
#define CETEST_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace cetest {

// SplitMix64. Satisfies UniformRandomBitGenerator. Construction is a single
// word, so the simulator can afford one stream per (seed, round, agent).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Unit-rate exponential variate.
  double Exponential() { return -std::log1p(-Uniform()); }

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from a root seed and a list of tags.
// Order of tags matters; the result is platform independent.
inline std::uint64_t StreamSeed(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = Rng::Mix(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t tag : tags) {
    h = Rng::Mix(h ^ Rng::Mix(tag + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

// Inverse-CDF draw from a discrete distribution. Entries need not be
// normalized exactly; the last positive entry absorbs rounding.
inline std::size_t SampleIndex(std::span<const double> probs, Rng& rng) {
  double u = rng.Uniform();
  double total = 0.0;
  for (double p : probs) total += p;
  u *= total;
  std::size_t last_positive = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last_positive;
}

// A point uniform on the (k-1)-simplex via normalized exponential variates.
inline std::vector<double> UniformSimplexPoint(int k, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (double& v : x) {
    v = rng.Exponential();
    sum += v;
  }
  if (sum <= 0.0) {
    for (double& v : x) v = 1.0 / k;
    return x;
  }
  for (double& v : x) v /= sum;
  return x;
}

}  // namespace cetest

#endif  // CETEST_RNG_H_
