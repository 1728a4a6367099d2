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

#ifndef CETEST_ERROR_H_
#define CETEST_ERROR_H_

#include <stdexcept>
#include <string>

namespace cetest {

// Malformed arguments: dimension mismatches, out-of-range probabilities,
// distributions that do not sum to one, and so on.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Conditioning on a signal that has zero marginal probability.
class UndefinedConditionalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Worst-case ψ is at least the requested error probability p, so no Type-2
// bound β in [0, 1) exists.
class InfeasiblePlanError : public std::runtime_error {
 public:
  InfeasiblePlanError(const std::string& what, double psi, double p)
      : std::runtime_error(what), psi_(psi), p_(p) {}
  double psi() const { return psi_; }
  double p() const { return p_; }

 private:
  double psi_;
  double p_;
};

// A schedule test index j whose plan is infeasible.
class InfeasibleScheduleError : public InfeasiblePlanError {
 public:
  InfeasibleScheduleError(const std::string& what, int test_index, double psi,
                          double p)
      : InfeasiblePlanError(what, psi, p), test_index_(test_index) {}
  int test_index() const { return test_index_; }

 private:
  int test_index_;
};

class HorizonExceededError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Too many agents to enumerate every deviating subset.
class SubsetExplosionError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Averages requested over a window that contains no rounds.
class NoDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cetest

#endif  // CETEST_ERROR_H_
