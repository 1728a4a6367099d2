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

"""Python bindings for the cetest library."""

import json

from cetest._core import (
    CorrelatedStrategy,
    Game,
    HorizonExceededError,
    InfeasiblePlanError,
    InfeasibleScheduleError,
    InvalidInputError,
    NoDataError,
    UndefinedConditionalError,
    chi2_cdf,
    chi2_quantile,
    chi2_sf,
    estimate_psi,
    load_game,
    load_strategy,
    noncentral_chi2_cdf,
    pearson_statistic,
    power_beta,
    sample_size,
    sensitivity_delta,
)
from cetest import _core

__all__ = [
    "CorrelatedStrategy",
    "Game",
    "HorizonExceededError",
    "InfeasiblePlanError",
    "InfeasibleScheduleError",
    "InvalidInputError",
    "NoDataError",
    "UndefinedConditionalError",
    "check_ce",
    "chi2_cdf",
    "chi2_quantile",
    "chi2_sf",
    "decide",
    "estimate_psi",
    "load_game",
    "load_strategy",
    "noncentral_chi2_cdf",
    "pearson_statistic",
    "plan_test",
    "power_beta",
    "sample_size",
    "schedule",
    "sensitivity_delta",
    "simulate",
]


def check_ce(game, sigma, tolerance=1e-9):
    return json.loads(_core._check_ce(game, sigma, tolerance))


def plan_test(game, sigma, p, delta_hat, mc_samples=200000, seed=0):
    return json.loads(_core._plan_test(game, sigma, p, delta_hat, mc_samples, seed))


def decide(game, sigma, counts, alpha):
    """One decision per agent on an already collected sample."""
    return json.loads(_core._decide(game, sigma, list(counts), alpha))


def schedule(game, sigma, horizon, mc_samples=200000, seed=0, validate_prefix=0):
    return _core._schedule(game, sigma, horizon, mc_samples, seed, validate_prefix)


def simulate(game, sigma, test_lengths, free_lengths, agents=None, seed=0, rounds=-1):
    """Plays the repeated game on a fixed-length schedule.

    `agents` is a list of agent dicts as in run configs, or None for
    signal-following agents with uniform learners.
    """
    text = json.dumps(agents) if agents is not None else ""
    out = _core._simulate(game, sigma, list(test_lengths), list(free_lengths), text, seed,
                          rounds)
    return {"summary": json.loads(out["summary"]), "transcript_csv": out["transcript_csv"]}
