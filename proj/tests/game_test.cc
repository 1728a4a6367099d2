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

#include "cetest/game.h"

#include <gtest/gtest.h>

#include <random>

#include "cetest/error.h"
#include "fixtures.h"
#include "oracle.h"

namespace cetest {
namespace {

TEST(ActionSpaceTest, RowMajorLastAgentFastest) {
  ActionSpace space({2, 3, 2});
  EXPECT_EQ(space.size(), 12u);
  const std::vector<int> a{1, 2, 0};
  EXPECT_EQ(space.Index(a), 1u * 6 + 2u * 2 + 0u);
  for (JointIndex i = 0; i < space.size(); ++i) {
    EXPECT_EQ(space.Index(space.Decode(i)), i);
    EXPECT_EQ(space.Decode(i), oracle::Decode(i, {2, 3, 2}));
  }
  EXPECT_EQ(space.WithAction(0, 1, 2), 4u);
}

TEST(GameTest, RejectsBadShapesAndNegativeUtilities) {
  EXPECT_THROW(Game({2, 2}, {0, 1, 2}), InvalidInputError);
  EXPECT_THROW(Game({2, 2}, {0, 1, 2, 5, 5, 2, 1, -1}), InvalidInputError);
  EXPECT_THROW(Game({0, 2}, {}), InvalidInputError);
}

TEST(GameTest, DefaultActionNamesAreOneBased) {
  const Game g = fixtures::Game2x2();
  EXPECT_EQ(g.ActionName(0, 0), "a_{1,1}");
  EXPECT_EQ(g.ActionName(1, 1), "a_{2,2}");
}

TEST(StrategyTest, Validation) {
  const Game g = fixtures::Game2x2();
  EXPECT_THROW(CorrelatedStrategy(g.space(), {0.1, 0.3, 0.2, 0.3}),
               InvalidInputError);
  EXPECT_THROW(CorrelatedStrategy(g.space(), {0.5, 0.5, 0.5, -0.5}),
               InvalidInputError);
  EXPECT_THROW(CorrelatedStrategy(g.space(), {0.5, 0.5}), InvalidInputError);
  EXPECT_THROW(MixedStrategy({0.2, 0.2}), InvalidInputError);
  EXPECT_NO_THROW(MixedStrategy({0.25, 0.75}));
}

TEST(ExpectedUtilityTest, UniformProfileAveragesThePayoffs) {
  const Game g = fixtures::Game2x2();
  const std::vector<MixedStrategy> profile{MixedStrategy::Uniform(2),
                                           MixedStrategy::Uniform(2)};
  const std::vector<double> u = ExpectedUtility(g, profile);
  EXPECT_DOUBLE_EQ(u[0], 2.0);
  EXPECT_DOUBLE_EQ(u[1], 2.0);
}

TEST(ExpectedUtilityTest, LinearInOneAgentsStrategy) {
  const Game g = fixtures::Game2x2();
  const MixedStrategy a({0.3, 0.7});
  const MixedStrategy b({0.9, 0.1});
  const MixedStrategy other({0.4, 0.6});
  const double lambda = 0.35;
  const MixedStrategy mix({lambda * 0.3 + (1 - lambda) * 0.9,
                           lambda * 0.7 + (1 - lambda) * 0.1});
  for (int agent = 0; agent < 2; ++agent) {
    const auto u = [&](const MixedStrategy& s) {
      std::vector<MixedStrategy> p{s, other};
      return ExpectedUtility(g, p);
    };
    const auto ua = u(a), ub = u(b), um = u(mix);
    EXPECT_NEAR(um[agent], lambda * ua[agent] + (1 - lambda) * ub[agent], 1e-9);
  }
}

TEST(ConditionalTest, ExampleOneAgentOneFirstSignal) {
  const Game g = fixtures::Game2x2();
  const std::vector<double> c = ConditionalGivenSignal(fixtures::Example1(g), 0, 0);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], 1.0 / 6, 1e-12);
  EXPECT_NEAR(c[1], 5.0 / 6, 1e-12);
}

TEST(ConditionalTest, ProductGivesOpponentMarginal) {
  const std::vector<MixedStrategy> profile{MixedStrategy({0.2, 0.8}),
                                           MixedStrategy({0.65, 0.35})};
  const CorrelatedStrategy s = CorrelatedStrategy::Product(profile);
  for (int signal = 0; signal < 2; ++signal) {
    const std::vector<double> c = ConditionalGivenSignal(s, 0, signal);
    EXPECT_NEAR(c[0], 0.65, 1e-12);
    EXPECT_NEAR(c[1], 0.35, 1e-12);
  }
}

TEST(ConditionalTest, ZeroMarginalSignalThrows) {
  const Game g = fixtures::Game2x2();
  const CorrelatedStrategy s(g.space(), {0.0, 0.0, 0.5, 0.5});
  EXPECT_THROW(ConditionalGivenSignal(s, 0, 0), UndefinedConditionalError);
}

TEST(CheckCeTest, ExampleOneIsAnEquilibrium) {
  const Game g = fixtures::Game2x2();
  const CeVerdict v = CheckCorrelatedEquilibrium(g, fixtures::Example1(g));
  EXPECT_TRUE(v.is_equilibrium);
  EXPECT_TRUE(v.violations.empty());
}

TEST(CheckCeTest, ExampleTwoFailsForAgentTwoOnly) {
  const Game g = fixtures::Game2x2();
  const CeVerdict v = CheckCorrelatedEquilibrium(g, fixtures::Example2(g));
  EXPECT_FALSE(v.is_equilibrium);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0].agent, 1);
  EXPECT_EQ(v.violations[0].signal, 0);
  EXPECT_EQ(v.violations[0].deviation, 1);
  // 10/3 - 4/3.
  EXPECT_NEAR(v.violations[0].gap, 2.0, 1e-12);
  EXPECT_EQ(v.ViolatingAgents(), std::vector<int>{1});
  EXPECT_TRUE(SatisfiesCeConstraints(g, fixtures::Example2(g), 0));
  EXPECT_FALSE(SatisfiesCeConstraints(g, fixtures::Example2(g), 1));
}

TEST(CheckCeTest, PureNashPointMassIsAnEquilibrium) {
  const Game g = fixtures::Game2x2();
  EXPECT_TRUE(CheckCorrelatedEquilibrium(g, CorrelatedStrategy::PointMass(g.space(), 2))
                  .is_equilibrium);
  EXPECT_TRUE(CheckCorrelatedEquilibrium(g, CorrelatedStrategy::PointMass(g.space(), 1))
                  .is_equilibrium);
  EXPECT_FALSE(CheckCorrelatedEquilibrium(g, CorrelatedStrategy::PointMass(g.space(), 0))
                   .is_equilibrium);
}

TEST(CheckCeTest, NonProductCorrelatedEquilibrium) {
  const Game g = fixtures::Game2x2();
  EXPECT_TRUE(CheckCorrelatedEquilibrium(g, fixtures::Correlated(g)).is_equilibrium);
}

TEST(MarginalTest, Examples) {
  const Game g = fixtures::Game2x2();
  const CorrelatedStrategy s = fixtures::Example1(g);
  const std::vector<int> exclude_two{1};
  const std::vector<int> a1{0};
  EXPECT_NEAR(MarginalExcluding(s, exclude_two, a1), 6.0 / 18, 1e-12);
  const std::vector<int> all{0, 1};
  EXPECT_NEAR(MarginalExcluding(s, all, {}), 1.0, 1e-12);
  const std::vector<int> none;
  const std::vector<int> full{1, 1};
  EXPECT_NEAR(MarginalExcluding(s, none, full), 10.0 / 18, 1e-12);
  const std::vector<int> bad{2};
  EXPECT_THROW(MarginalExcluding(s, bad, a1), InvalidInputError);
  EXPECT_NEAR(MarginalExcludingMask(s, 0b10, 1), 6.0 / 18, 1e-12);
}

// Random games: the library verdict matches the unconditional brute force,
// and mixtures of two equilibria stay equilibria.
TEST(CheckCePropertyTest, AgreesWithBruteForceOnRandomGames) {
  std::mt19937_64 gen(20260415);
  std::uniform_int_distribution<int> agents_d(1, 3), actions_d(1, 3), coin(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int equilibria = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> counts(agents_d(gen));
    for (int& c : counts) c = actions_d(gen);
    std::size_t size = 1;
    for (int c : counts) size *= c;
    std::vector<double> u(size * counts.size());
    for (double& x : u) x = std::floor(unit(gen) * 6);
    const Game g(counts, u);
    std::vector<double> sigma(size);
    double total = 0;
    for (double& x : sigma) {
      x = coin(gen) == 0 ? 0.0 : unit(gen);
      total += x;
    }
    if (total == 0) sigma[0] = total = 1;
    for (double& x : sigma) x /= total;
    // Pure profiles too, so both verdicts are exercised.
    const CorrelatedStrategy s =
        trial % 3 == 0 ? CorrelatedStrategy::PointMass(g.space(), trial % size)
                       : CorrelatedStrategy(g.space(), sigma);
    const std::vector<double> probs(s.probs().begin(), s.probs().end());
    const bool expected = oracle::BruteForceIsCe(counts, u, probs, 1e-9);
    EXPECT_EQ(CheckCorrelatedEquilibrium(g, s).is_equilibrium, expected)
        << "trial " << trial;
    equilibria += expected;
  }
  EXPECT_GT(equilibria, 10);
  EXPECT_LT(equilibria, 190);
}

TEST(CheckCePropertyTest, ConvexCombinationOfEquilibria) {
  const Game g = fixtures::Game2x2();
  const CorrelatedStrategy a = fixtures::Example1(g);
  const CorrelatedStrategy b = fixtures::Correlated(g);
  for (double lambda : {0.0, 0.1, 0.5, 0.77, 1.0}) {
    std::vector<double> mix(4);
    for (int k = 0; k < 4; ++k) mix[k] = lambda * a[k] + (1 - lambda) * b[k];
    EXPECT_TRUE(CheckCorrelatedEquilibrium(g, CorrelatedStrategy(g.space(), mix))
                    .is_equilibrium);
  }
}

}  // namespace
}  // namespace cetest
