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

// cetest: check-ce, plan, test, schedule, simulate.
//
// Exit codes: 0 success or accept, 1 domain negative (not a CE, reject,
// infeasible plan), 2 usage or validation error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cetest/error.h"
#include "cetest/game.h"
#include "cetest/io.h"
#include "cetest/schedule.h"
#include "cetest/sim.h"
#include "cetest/verifier.h"

namespace fs = std::filesystem;
using namespace cetest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::string game;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::int64_t> mc_samples;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Run config (JSON)");
  cmd->add_option("--game", c.game, "Game file (JSON)");
  cmd->add_option("--strategy", c.strategy, "Mediator strategy file (JSON)");
  cmd->add_option("--seed", c.seed, "Root random seed");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--mc-samples", c.mc_samples, "Monte Carlo draws per subset for psi");
}

// Config file first, then flags on top.
RunConfig Resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config.empty()) cfg = LoadRunConfig(c.config);
  if (!c.game.empty()) cfg.game = c.game;
  if (!c.strategy.empty()) cfg.strategy = c.strategy;
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.out = c.out;
  if (c.mc_samples) cfg.mc_samples = *c.mc_samples;
  if (cfg.game.empty()) throw InvalidInputError("--game is required");
  if (cfg.strategy.empty()) throw InvalidInputError("--strategy is required");
  return cfg;
}

std::string AgentLabel(int agent) { return "agent " + std::to_string(agent + 1); }

std::string ConfigHash(const Json& effective) { return Fnv1aHex(effective.dump()); }

Json BaseEffective(std::string_view command, const RunConfig& cfg) {
  Json j;
  j["command"] = command;
  j["game"] = ReadTextFile(cfg.game);
  j["strategy"] = ReadTextFile(cfg.strategy);
  j["seed"] = cfg.seed;
  return j;
}

void Finish(const RunConfig& cfg, std::string_view command, const Json& effective,
            const std::vector<std::pair<std::string, std::string>>& files) {
  if (cfg.out.empty()) return;
  std::vector<std::string> names;
  for (const auto& [name, text] : files) {
    WriteTextFile(cfg.out / name, text);
    names.push_back(name);
  }
  WriteManifest(cfg.out, command, ConfigHash(effective), cfg.seed, names);
}

int CheckCe(const Common& c, double tolerance) {
  const RunConfig cfg = Resolve(c);
  const Game game = LoadGame(cfg.game);
  const CorrelatedStrategy sigma = LoadStrategy(cfg.strategy, game.space());
  const CeVerdict verdict = CheckCorrelatedEquilibrium(game, sigma, tolerance);
  std::cout << "correlated equilibrium: " << (verdict.is_equilibrium ? "yes" : "no")
            << "\n";
  if (!verdict.is_equilibrium) {
    std::cout << "violating agents:";
    for (int i : verdict.ViolatingAgents()) std::cout << ' ' << (i + 1);
    std::cout << "\n";
    for (const CeViolation& v : verdict.violations) {
      std::cout << "  " << AgentLabel(v.agent) << ", signal "
                << game.ActionName(v.agent, v.signal) << ": playing "
                << game.ActionName(v.agent, v.deviation) << " instead gains "
                << FormatDouble(v.gap) << "\n";
    }
  }
  Json effective = BaseEffective("check-ce", cfg);
  effective["tolerance"] = tolerance;
  Finish(cfg, "check-ce", effective,
         {{"check_ce.json", CeVerdictToJson(verdict).dump(2) + "\n"}});
  return verdict.is_equilibrium ? kExitOk : kExitNegative;
}

int Plan(const Common& c, std::optional<double> p, std::optional<double> delta_hat) {
  RunConfig cfg = Resolve(c);
  if (p) cfg.p = *p;
  if (delta_hat) cfg.delta_hat = *delta_hat;
  const Game game = LoadGame(cfg.game);
  const CorrelatedStrategy sigma = LoadStrategy(cfg.strategy, game.space());
  Json effective = BaseEffective("plan", cfg);
  effective["p"] = cfg.p;
  effective["delta_hat"] = cfg.delta_hat;
  effective["mc_samples"] = cfg.mc_samples;
  PlanOptions options;
  options.mc_samples = cfg.mc_samples;
  options.seed = cfg.seed;
  try {
    const TestPlan plan = PlanTest(game, sigma, cfg.p, cfg.delta_hat, options);
    const std::string text = PlanToJson(plan).dump(2) + "\n";
    std::cout << text;
    Finish(cfg, "plan", effective, {{"plan.json", text}});
    return kExitOk;
  } catch (const InfeasiblePlanError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    Json j;
    j["feasible"] = false;
    j["psi"] = e.psi();
    j["p"] = e.p();
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    Finish(cfg, "plan", effective, {{"plan.json", text}});
    return kExitNegative;
  }
}

struct TestArgs {
  std::optional<double> p;
  std::optional<double> delta_hat;
  std::string counts;
  std::string simulate_under;
  std::optional<std::int64_t> length;
};

int Test(const Common& c, const TestArgs& a) {
  RunConfig cfg = Resolve(c);
  if (a.p) cfg.p = *a.p;
  if (a.delta_hat) cfg.delta_hat = *a.delta_hat;
  if (a.counts.empty() == a.simulate_under.empty()) {
    throw InvalidInputError("give exactly one of --counts or --simulate-under");
  }
  const Game game = LoadGame(cfg.game);
  const CorrelatedStrategy sigma = LoadStrategy(cfg.strategy, game.space());
  Json effective = BaseEffective("test", cfg);
  effective["p"] = cfg.p;

  std::vector<std::int64_t> counts;
  std::string source;
  if (!a.counts.empty()) {
    counts = LoadCounts(a.counts);
    effective["counts"] = ReadTextFile(a.counts);
    source = "file";
  } else {
    std::vector<std::optional<MixedStrategy>> deviations(game.num_agents());
    source = "mediator";
    if (a.simulate_under != "mediator") {
      const DeviationProfile profile = LoadDeviationProfile(a.simulate_under, game);
      deviations = profile.fallbacks;
      source = profile.name;
      effective["profile"] = ReadTextFile(a.simulate_under);
    }
    std::int64_t length = 0;
    if (a.length) {
      length = *a.length;
    } else {
      PlanOptions options;
      options.mc_samples = cfg.mc_samples;
      options.seed = cfg.seed;
      length = PlanTest(game, sigma, cfg.p, cfg.delta_hat, options).sample_size;
      effective["delta_hat"] = cfg.delta_hat;
      effective["mc_samples"] = cfg.mc_samples;
    }
    effective["length"] = length;
    counts = SampleTestCounts(sigma, deviations, length, cfg.seed);
  }
  std::int64_t total = 0;
  for (std::int64_t x : counts) total += x;
  if (counts.size() != sigma.size()) {
    throw InvalidInputError("counts have " + std::to_string(counts.size()) +
                            " cells, the game has " + std::to_string(sigma.size()));
  }
  const TestPlan plan = DecisionPlan(sigma, cfg.p, total);

  bool any_reject = false;
  Json report;
  report["source"] = source;
  report["counts"] = counts;
  report["alpha"] = plan.alpha;
  report["critical_value"] = plan.critical_value;
  report["df_total"] = plan.df_total;
  Json per_agent = Json::array();
  for (int i = 0; i < game.num_agents(); ++i) {
    const Decision d = RunSamplingDecision(plan, game, sigma, i, counts);
    any_reject = any_reject || IsReject(d.outcome);
    std::cout << AgentLabel(i) << ": "
              << (IsReject(d.outcome) ? "reject" : "do not reject") << " ("
              << OutcomeName(d.outcome) << ")";
    if (d.statistic) std::cout << ", T = " << FormatDouble(*d.statistic);
    if (d.p_value) std::cout << ", p-value = " << FormatDouble(*d.p_value);
    std::cout << "\n";
    Json x = DecisionToJson(d);
    x["agent"] = i;
    per_agent.push_back(x);
  }
  report["decisions"] = per_agent;
  std::cout << "critical value c(" << FormatDouble(plan.alpha)
            << ") = " << FormatDouble(plan.critical_value) << ", df = "
            << plan.df_total << ", l_T = " << total << "\n";
  std::cout << "decision: " << (any_reject ? "reject" : "do not reject") << "\n";
  Finish(cfg, "test", effective, {{"decision.json", report.dump(2) + "\n"}});
  return any_reject ? kExitNegative : kExitOk;
}

Schedule MakeSchedule(const Game& game, const CorrelatedStrategy& sigma,
                      const RunConfig& cfg) {
  if (!cfg.test_lengths.empty()) {
    return BuildFixedLengthSchedule(sigma, cfg.test_lengths, cfg.free_lengths,
                                    cfg.rules);
  }
  PlanOptions options;
  options.mc_samples = cfg.mc_samples;
  options.seed = cfg.seed;
  return BuildSchedule(game, sigma, cfg.rules, cfg.horizon, options);
}

Json ScheduleEffective(std::string_view command, const RunConfig& cfg) {
  Json effective = BaseEffective(command, cfg);
  effective["horizon"] = cfg.horizon;
  effective["mc_samples"] = cfg.mc_samples;
  effective["rules"] = {cfg.rules.delta.Describe(), cfg.rules.p.Describe(),
                        cfg.rules.free_length.Describe()};
  effective["test_lengths"] = cfg.test_lengths;
  effective["free_lengths"] = cfg.free_lengths;
  return effective;
}

int ScheduleCmd(const Common& c, std::optional<int> horizon, int prefix) {
  RunConfig cfg = Resolve(c);
  if (horizon) cfg.horizon = *horizon;
  const Game game = LoadGame(cfg.game);
  const CorrelatedStrategy sigma = LoadStrategy(cfg.strategy, game.space());
  Json effective = ScheduleEffective("schedule", cfg);
  try {
    const Schedule schedule = MakeSchedule(game, sigma, cfg);
    const std::string csv = ScheduleCsv(schedule);
    std::cout << csv;
    std::vector<std::pair<std::string, std::string>> files{{"schedule.csv", csv}};
    const int k = prefix > 0 ? prefix : schedule.num_tests();
    bool ok = true;
    if (k >= 2) {
      const ScheduleValidation v = ValidateSchedule(schedule, k);
      Json jv;
      jv["prefix_tests"] = v.prefix_tests;
      jv["conforming"] = v.conforming;
      for (const ConditionCheck* check : {&v.ratio_vanishes, &v.superlinear_tests,
                                          &v.delta_decreasing, &v.p_summable}) {
        jv[check->name] = {{"passed", check->passed}, {"detail", check->detail}};
        std::cerr << check->name << ": " << (check->passed ? "pass" : "fail")
                  << " (" << check->detail << ")\n";
      }
      jv["length_ratios"] = v.length_ratios;
      files.emplace_back("validation.json", jv.dump(2) + "\n");
      ok = v.all_passed();
    }
    Finish(cfg, "schedule", effective, files);
    return ok ? kExitOk : kExitNegative;
  } catch (const InfeasibleScheduleError& e) {
    std::cerr << "infeasible at test " << e.test_index() << ": " << e.what()
              << "\n";
    return kExitNegative;
  }
}

struct SimulateArgs {
  std::optional<int> horizon;
  std::optional<std::int64_t> rounds;
  std::vector<std::uint64_t> seeds;
  std::optional<int> free_periods;
  int threads = 0;
};

int Simulate(const Common& c, const SimulateArgs& a) {
  RunConfig cfg = Resolve(c);
  if (a.horizon) cfg.horizon = *a.horizon;
  if (a.rounds) cfg.rounds = *a.rounds;
  if (!a.seeds.empty()) cfg.seeds = a.seeds;
  if (a.free_periods) {
    if (*a.free_periods < 0) throw InvalidInputError("--free-periods must be >= 0");
    cfg.horizon = std::max(1, *a.free_periods);
    if (!cfg.test_lengths.empty()) {
      cfg.test_lengths.resize(static_cast<std::size_t>(cfg.horizon),
                              cfg.test_lengths.back());
      cfg.free_lengths.resize(static_cast<std::size_t>(cfg.horizon),
                              cfg.free_lengths.back());
    }
  }
  const Game game = LoadGame(cfg.game);
  const CorrelatedStrategy sigma = LoadStrategy(cfg.strategy, game.space());
  if (cfg.agents.empty()) cfg.agents.resize(static_cast<std::size_t>(game.num_agents()));
  if (static_cast<int>(cfg.agents.size()) != game.num_agents()) {
    throw InvalidInputError("one agent config per agent required");
  }

  Json effective = ScheduleEffective("simulate", cfg);
  effective["rounds"] = cfg.rounds;
  effective["seeds"] = cfg.seeds;
  effective["free_periods"] = a.free_periods ? Json(*a.free_periods) : Json(nullptr);
  Json agents = Json::array();
  for (const AgentConfig& ac : cfg.agents) {
    Json x;
    x["policy"] = ac.policy == AgentPolicy::kLambda ? "lambda" : "pure-learner";
    x["learner"] = ac.learner.name;
    x["params"] = ac.learner.params;
    if (ac.fallback) {
      x["fallback"] = std::vector<double>(ac.fallback->probs().begin(),
                                          ac.fallback->probs().end());
    }
    agents.push_back(x);
  }
  effective["agents"] = agents;

  Schedule schedule;
  try {
    schedule = MakeSchedule(game, sigma, cfg);
  } catch (const InfeasibleScheduleError& e) {
    std::cerr << "infeasible at test " << e.test_index() << ": " << e.what()
              << "\n";
    return kExitNegative;
  }
  if (a.free_periods && *a.free_periods == 0) {
    schedule = Schedule(schedule.plans(), {}, schedule.rules(), schedule.conforming());
  }
  RunOptions options;
  options.config_snapshot = effective.dump();

  std::vector<std::pair<std::string, std::string>> files{
      {"schedule.csv", ScheduleCsv(schedule)}};
  auto report = [&](const Transcript& tr, const std::string& prefix) {
    Json summary = TranscriptSummary(tr, game, sigma);
    files.emplace_back(prefix + "transcript.csv", TranscriptCsv(tr, game));
    files.emplace_back(prefix + "summary.json", summary.dump(2) + "\n");
    return summary;
  };

  if (cfg.seeds.empty()) {
    const Transcript tr =
        RunGame(game, sigma, schedule, cfg.agents, cfg.seed, cfg.rounds, options);
    const Json summary = report(tr, "");
    std::cout << "rounds: " << tr.rounds.size() << "\n";
    for (const DecisionRecord& d : tr.decisions) {
      std::cout << "R" << d.test << " " << AgentLabel(d.agent) << ": "
                << OutcomeName(d.decision.outcome) << "\n";
    }
    std::cout << "average utility:";
    for (const auto& v : summary["average_utility"]) std::cout << ' ' << v.dump();
    std::cout << "\n";
  } else {
    const std::vector<Transcript> runs = ParallelMap(
        std::span<const std::uint64_t>(cfg.seeds),
        [&](std::uint64_t s) {
          return RunGame(game, sigma, schedule, cfg.agents, s, cfg.rounds, options);
        },
        a.threads);
    Json batch;
    batch["seeds"] = cfg.seeds;
    std::map<std::string, std::int64_t> rejects;
    for (const Transcript& tr : runs) {
      report(tr, "seed_" + std::to_string(tr.seed) + "/");
      for (const DecisionRecord& d : tr.decisions) {
        if (IsReject(d.decision.outcome)) {
          ++rejects["R" + std::to_string(d.test) + "/agent_" + std::to_string(d.agent)];
        }
      }
    }
    batch["reject_counts"] = rejects;
    files.emplace_back("batch.json", batch.dump(2) + "\n");
    std::cout << "runs: " << runs.size() << "\n" << batch["reject_counts"].dump() << "\n";
  }
  Finish(cfg, "simulate", effective, files);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical verification of a mediator's correlated strategy"};
  app.require_subcommand(1);

  Common check_common;
  double tolerance = kDefaultCeTolerance;
  CLI::App* check = app.add_subcommand("check-ce", "Check the correlated-equilibrium inequalities");
  AddCommon(check, check_common);
  check->add_option("--tolerance", tolerance, "Gap tolerance");

  Common plan_common;
  std::optional<double> plan_p;
  std::optional<double> plan_delta;
  CLI::App* plan = app.add_subcommand("plan", "Plan one sampling test");
  AddCommon(plan, plan_common);
  plan->add_option("--p", plan_p, "Target error probability");
  plan->add_option("--delta-hat", plan_delta, "Sensitivity threshold");

  Common test_common;
  TestArgs test_args;
  CLI::App* test = app.add_subcommand("test", "Decide on one sample");
  AddCommon(test, test_common);
  test->add_option("--p", test_args.p, "Significance level alpha");
  test->add_option("--delta-hat", test_args.delta_hat,
                   "Sensitivity threshold (sizes a simulated sample)");
  test->add_option("--counts", test_args.counts, "Observed counts file (JSON)");
  test->add_option("--simulate-under", test_args.simulate_under,
                   "'mediator' or a deviation profile file (JSON)");
  test->add_option("--length", test_args.length, "Simulated sample size");

  Common schedule_common;
  std::optional<int> schedule_horizon;
  int prefix = 0;
  CLI::App* schedule = app.add_subcommand("schedule", "Build and validate a test schedule");
  AddCommon(schedule, schedule_common);
  schedule->add_option("--horizon", schedule_horizon, "Number of tests");
  schedule->add_option("--validate-prefix", prefix, "Tests to validate (default: all)");

  Common sim_common;
  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the repeated game");
  AddCommon(simulate, sim_common);
  simulate->add_option("--horizon", sim_args.horizon, "Number of tests");
  simulate->add_option("--rounds", sim_args.rounds, "Rounds to play (default: all)");
  simulate->add_option("--seeds", sim_args.seeds, "Batch mode: one run per seed");
  simulate->add_option("--free-periods", sim_args.free_periods,
                       "Tests to schedule; 0 gives one test and no free period");
  simulate->add_option("--threads", sim_args.threads, "Batch worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return CheckCe(check_common, tolerance);
    if (*plan) return Plan(plan_common, plan_p, plan_delta);
    if (*test) return Test(test_common, test_args);
    if (*schedule) return ScheduleCmd(schedule_common, schedule_horizon, prefix);
    if (*simulate) return Simulate(sim_common, sim_args);
  } catch (const InfeasiblePlanError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitNegative;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
