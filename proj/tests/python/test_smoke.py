# Copyright 2026 The cetest Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
from fractions import Fraction
from pathlib import Path

import pytest

import cetest

DATA = Path(os.environ.get("CETEST_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


@pytest.fixture
def game():
    return cetest.load_game(str(DATA / "game_2x2.json"))


def strategy(game, name):
    return cetest.load_strategy(str(DATA / name), game)


def test_check_ce(game):
    assert cetest.check_ce(game, strategy(game, "example1_strategy.json"))["correlated_equilibrium"]
    verdict = cetest.check_ce(game, strategy(game, "example2_strategy.json"))
    assert verdict["violating_agents"] == [1]


def test_invalid_strategy_raises(game):
    with pytest.raises(ValueError):
        cetest.CorrelatedStrategy(game, [0.5, 0.5])


def test_chi2():
    assert cetest.chi2_quantile(0.9, 3) == pytest.approx(6.251, abs=0.005)
    assert 0.004 <= cetest.noncentral_chi2_cdf(6.251, 4, 21) <= 0.009


def test_plan_example_one(game):
    plan = cetest.plan_test(game, strategy(game, "example1_strategy.json"), 0.1, 0.01,
                            mc_samples=50000, seed=3)
    assert plan["alpha"] == 0.1
    assert plan["psi"] == pytest.approx(0.0943, abs=0.01)
    assert 1900 <= plan["sample_size"] <= 2300


def test_infeasible_plan(game):
    with pytest.raises(cetest.InfeasiblePlanError):
        cetest.plan_test(game, strategy(game, "example1_strategy.json"), 0.05, 0.01,
                         mc_samples=20000, seed=3)


def test_decide(game):
    ex1 = strategy(game, "example1_strategy.json")
    assert [d["outcome"] for d in cetest.decide(game, ex1, [96, 601, 224, 1179], 0.1)] == [
        "FollowMediator", "FollowMediator"]
    ex2 = strategy(game, "example2_strategy.json")
    out = cetest.decide(game, ex2, [1050, 350, 525, 175], 0.1)
    assert out[1]["outcome"] == "RejectByEq2"
    assert out[0]["statistic"] == pytest.approx(5145.0, abs=1.0)


def test_sensitivity_delta():
    m = [Fraction(2, 18), Fraction(10, 18), Fraction(1, 18), Fraction(5, 18)]
    actual = [Fraction(1, 2), Fraction(1, 6), Fraction(1, 4), Fraction(1, 12)]
    exact = sum((a - b) ** 2 / b for a, b in zip(actual, m))
    assert exact == Fraction(49, 20)
    assert cetest.sensitivity_delta([float(x) for x in m], [float(x) for x in actual]) == \
        pytest.approx(2.45, abs=1e-12)


def test_simulate_is_reproducible(game):
    ex2 = strategy(game, "example2_strategy.json")
    agents = [{"policy": "lambda", "learner": {"name": "fictitious-play"}},
              {"policy": "lambda", "learner": {"name": "fictitious-play"},
               "fallback": [0.75, 0.25]}]
    a = cetest.simulate(game, ex2, [100], [500], agents, seed=9)
    b = cetest.simulate(game, ex2, [100], [500], agents, seed=9)
    assert a == b
    assert a["transcript_csv"].count("\n") == 601
    with pytest.raises(IndexError):
        cetest.simulate(game, ex2, [100], [500], agents, seed=9, rounds=601)


def test_schedule(game):
    out = cetest.schedule(game, strategy(game, "correlated_strategy.json"), 3,
                          mc_samples=20000, seed=11, validate_prefix=3)
    assert out["valid"]
    assert out["csv"].startswith("kind,j,begin,length")
