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

#ifndef CETEST_TESTS_FIXTURES_H_
#define CETEST_TESTS_FIXTURES_H_

#include <filesystem>
#include <string>

#include "cetest/game.h"

namespace fixtures {

// The 2x2 game with utilities (0,1) (2,5) / (5,2) (1,0).
inline cetest::Game Game2x2() {
  return cetest::Game({2, 2}, {0, 1, 2, 5, 5, 2, 1, 0});
}

inline cetest::CorrelatedStrategy Example1(const cetest::Game& g) {
  return cetest::CorrelatedStrategy(g.space(),
                                    {1.0 / 18, 5.0 / 18, 2.0 / 18, 10.0 / 18});
}

inline cetest::CorrelatedStrategy Example2(const cetest::Game& g) {
  return cetest::CorrelatedStrategy(g.space(),
                                    {2.0 / 18, 10.0 / 18, 1.0 / 18, 5.0 / 18});
}

// A correlated (non-product) equilibrium of the same game.
inline cetest::CorrelatedStrategy Correlated(const cetest::Game& g) {
  return cetest::CorrelatedStrategy(g.space(), {0.05, 0.45, 0.45, 0.05});
}

inline std::filesystem::path DataDir() { return CETEST_DATA_DIR; }

}  // namespace fixtures

#endif  // CETEST_TESTS_FIXTURES_H_
