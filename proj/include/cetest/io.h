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

// File formats. All inputs are JSON; agents and actions are 0-based.
//
// Game:
//   {"num_agents": 2, "action_counts": [2, 2],
//    "action_names": [["up", "down"], ["left", "right"]],   (optional)
//    "utilities": [[0, 1], [2, 5], [5, 2], [1, 0]]}
// `utilities` lists one n-vector per joint action, row-major with the last
// agent varying fastest. A flat array of |A|*n numbers is also accepted.
//
// Strategy: {"probs": [...]} or a bare array over joint actions. Entries may
// be numbers or exact fractions written as strings, e.g. "5/18".
//
// Counts: {"counts": [...]} or a bare array of nonnegative integers.
//
// Deviation profile: {"name": "...", "fallbacks": [null, [0.75, 0.25]]}
// with null for agents that follow their signals.
//
// Run config: see RunConfig below. Relative paths resolve against the
// config file's directory.

#ifndef CETEST_IO_H_
#define CETEST_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cetest/game.h"
#include "cetest/schedule.h"
#include "cetest/sim.h"
#include "cetest/verifier.h"

namespace cetest {

using Json = nlohmann::ordered_json;

// Throws InvalidInputError with the path in the message on any failure.
Json ReadJsonFile(const std::filesystem::path& path);
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

// A number, or a string "a/b" or "a".
double ParseProbability(const Json& value);

Game GameFromJson(const Json& j);
Json GameToJson(const Game& game);
Game LoadGame(const std::filesystem::path& path);

CorrelatedStrategy StrategyFromJson(const Json& j, const ActionSpace& space);
CorrelatedStrategy LoadStrategy(const std::filesystem::path& path,
                                const ActionSpace& space);

std::vector<std::int64_t> CountsFromJson(const Json& j);
std::vector<std::int64_t> LoadCounts(const std::filesystem::path& path);

struct DeviationProfile {
  std::string name;
  std::vector<std::optional<MixedStrategy>> fallbacks;
};
DeviationProfile DeviationProfileFromJson(const Json& j, const Game& game);
DeviationProfile LoadDeviationProfile(const std::filesystem::path& path,
                                      const Game& game);

// Everything a command may need. Fields absent from the file keep these
// defaults.
//
//   {"game": "game_2x2.json", "strategy": "example1_strategy.json",
//    "p": 0.1, "delta_hat": 0.01, "mc_samples": 200000, "seed": 7,
//    "schedule": {"horizon": 3,
//                 "delta_rule": {"kind": "harmonic", "scale": 1},
//                 "p_rule": {"kind": "geometric", "first": 0.5, "ratio": 0.5},
//                 "free_length_rule": {"kind": "power", "exponent": 2},
//                 "test_lengths": [100, 200], "free_lengths": [1000, 4000]},
//    "agents": [{"policy": "lambda",
//                "learner": {"name": "fictitious-play", "params": {}},
//                "fallback": [0.75, 0.25]}],
//    "rounds": -1, "seeds": [1, 2, 3], "out": "out"}
//
// With test_lengths present the schedule is fixed-length (non-conforming).
struct RunConfig {
  std::filesystem::path game;
  std::filesystem::path strategy;
  double p = 0.1;
  double delta_hat = 0.01;
  std::int64_t mc_samples = kDefaultPsiSamples;
  std::uint64_t seed = 0;
  ScheduleRules rules;
  int horizon = 3;
  std::vector<std::int64_t> test_lengths;
  std::vector<std::int64_t> free_lengths;
  std::vector<AgentConfig> agents;  // empty: every agent runs Λ with uniform L
  std::int64_t rounds = -1;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out;
};

RunConfig RunConfigFromJson(const Json& j,
                            const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);
ScheduleRules ScheduleRulesFromJson(const Json& j);
AgentConfig AgentConfigFromJson(const Json& j, const Game& game, int agent);

Json PlanToJson(const TestPlan& plan);
Json DecisionToJson(const Decision& decision);
Json CeVerdictToJson(const CeVerdict& verdict);

// Columns kind, j, begin, length, delta, p, alpha, beta, psi, l_T. Plan
// columns are blank on free-period rows.
std::string ScheduleCsv(const Schedule& schedule);

// One row per round: t, phase, per-agent signals, actions and utilities.
std::string TranscriptCsv(const Transcript& transcript, const Game& game);

// Decisions, per-phase average utilities, free-period TV distances.
Json TranscriptSummary(const Transcript& transcript, const Game& game,
                       const CorrelatedStrategy& sigma_m);

// 64-bit FNV-1a, as 16 hex digits.
std::string Fnv1aHex(std::string_view bytes);

// Writes <dir>/manifest.json naming the command, config hash, seed and
// outputs. The timestamp lives only here.
void WriteManifest(const std::filesystem::path& dir, std::string_view command,
                   std::string_view config_hash, std::uint64_t seed,
                   const std::vector<std::string>& outputs);

// Shortest round-trip decimal form of x; "nan" and "inf" spelled out.
std::string FormatDouble(double x);

}  // namespace cetest

#endif  // CETEST_IO_H_
