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

#include "cetest/io.h"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "cetest/error.h"

namespace cetest {

namespace fs = std::filesystem;

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json ReadJsonFile(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

void WriteTextFile(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInputError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double ParseNumberText(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidInputError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidInputError("not a number: '" + s + "'");
  return v;
}

Json JsonNumberOrNull(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

template <class T>
T Get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidInputError(std::string("field '") + key + "': " + e.what());
  }
}

const Json& Unwrap(const Json& j, const char* key) {
  if (j.is_object()) {
    if (!j.contains(key)) {
      throw InvalidInputError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
  }
  return j;
}

MixedStrategy MixedFromJson(const Json& j) {
  if (!j.is_array()) throw InvalidInputError("mixed strategy must be an array");
  std::vector<double> probs;
  for (const Json& v : j) probs.push_back(ParseProbability(v));
  return MixedStrategy(std::move(probs));
}

}  // namespace

double ParseProbability(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return ParseNumberText(s);
    const double num = ParseNumberText(s.substr(0, slash));
    const double den = ParseNumberText(s.substr(slash + 1));
    if (den == 0.0) throw InvalidInputError("zero denominator in '" + s + "'");
    return num / den;
  }
  throw InvalidInputError("expected a number or a fraction string, got " +
                          value.dump());
}

Game GameFromJson(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("game must be a JSON object");
  if (!j.contains("action_counts")) {
    throw InvalidInputError("game is missing 'action_counts'");
  }
  std::vector<int> counts;
  try {
    counts = j.at("action_counts").get<std::vector<int>>();
  } catch (const Json::exception& e) {
    throw InvalidInputError(std::string("action_counts: ") + e.what());
  }
  if (j.contains("num_agents") &&
      j.at("num_agents").get<int>() != static_cast<int>(counts.size())) {
    throw InvalidInputError("num_agents disagrees with action_counts");
  }
  if (!j.contains("utilities") || !j.at("utilities").is_array()) {
    throw InvalidInputError("game is missing the 'utilities' array");
  }
  std::vector<double> flat;
  for (const Json& row : j.at("utilities")) {
    if (row.is_array()) {
      if (row.size() != counts.size()) {
        throw InvalidInputError("each utility vector needs one entry per agent");
      }
      for (const Json& v : row) flat.push_back(ParseProbability(v));
    } else {
      flat.push_back(ParseProbability(row));
    }
  }
  std::vector<std::vector<std::string>> names;
  if (j.contains("action_names") && !j.at("action_names").is_null()) {
    try {
      names = j.at("action_names").get<std::vector<std::vector<std::string>>>();
    } catch (const Json::exception& e) {
      throw InvalidInputError(std::string("action_names: ") + e.what());
    }
  }
  return Game(std::move(counts), std::move(flat), std::move(names));
}

Json GameToJson(const Game& game) {
  Json j;
  j["num_agents"] = game.num_agents();
  j["action_counts"] = game.action_counts();
  Json names = Json::array();
  for (int i = 0; i < game.num_agents(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < game.action_count(i); ++k) {
      row.push_back(game.ActionName(i, k));
    }
    names.push_back(row);
  }
  j["action_names"] = names;
  Json utils = Json::array();
  for (JointIndex a = 0; a < game.num_joint_actions(); ++a) {
    Json row = Json::array();
    for (int i = 0; i < game.num_agents(); ++i) row.push_back(game.utility(a, i));
    utils.push_back(row);
  }
  j["utilities"] = utils;
  return j;
}

Game LoadGame(const fs::path& path) {
  try {
    return GameFromJson(ReadJsonFile(path));
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

CorrelatedStrategy StrategyFromJson(const Json& j, const ActionSpace& space) {
  const Json& arr = Unwrap(j, "probs");
  if (!arr.is_array()) throw InvalidInputError("strategy must be an array");
  std::vector<double> probs;
  for (const Json& v : arr) probs.push_back(ParseProbability(v));
  return CorrelatedStrategy(space, std::move(probs));
}

CorrelatedStrategy LoadStrategy(const fs::path& path, const ActionSpace& space) {
  try {
    return StrategyFromJson(ReadJsonFile(path), space);
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

std::vector<std::int64_t> CountsFromJson(const Json& j) {
  const Json& arr = Unwrap(j, "counts");
  if (!arr.is_array()) throw InvalidInputError("counts must be an array");
  std::vector<std::int64_t> out;
  for (const Json& v : arr) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw InvalidInputError("counts must be nonnegative integers");
    }
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

std::vector<std::int64_t> LoadCounts(const fs::path& path) {
  try {
    return CountsFromJson(ReadJsonFile(path));
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

DeviationProfile DeviationProfileFromJson(const Json& j, const Game& game) {
  DeviationProfile profile;
  profile.name = Get<std::string>(j, "name", "deviation");
  const Json& arr = Unwrap(j, "fallbacks");
  if (!arr.is_array() || static_cast<int>(arr.size()) != game.num_agents()) {
    throw InvalidInputError("fallbacks needs one entry per agent");
  }
  for (int i = 0; i < game.num_agents(); ++i) {
    const Json& v = arr[static_cast<std::size_t>(i)];
    if (v.is_null()) {
      profile.fallbacks.emplace_back(std::nullopt);
      continue;
    }
    MixedStrategy s = MixedFromJson(v);
    if (static_cast<int>(s.size()) != game.action_count(i)) {
      throw InvalidInputError("fallback of agent " + std::to_string(i) +
                              " has the wrong number of actions");
    }
    profile.fallbacks.emplace_back(std::move(s));
  }
  return profile;
}

DeviationProfile LoadDeviationProfile(const fs::path& path, const Game& game) {
  try {
    return DeviationProfileFromJson(ReadJsonFile(path), game);
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

ScheduleRules ScheduleRulesFromJson(const Json& j) {
  ScheduleRules rules;
  if (j.contains("delta_rule")) {
    const Json& d = j.at("delta_rule");
    const std::string kind = Get<std::string>(d, "kind", "harmonic");
    if (kind == "harmonic") {
      rules.delta.kind = DeltaRule::Kind::kHarmonic;
    } else if (kind == "geometric") {
      rules.delta.kind = DeltaRule::Kind::kGeometric;
    } else if (kind == "constant") {
      rules.delta.kind = DeltaRule::Kind::kConstant;
    } else {
      throw InvalidInputError("unknown delta_rule kind '" + kind + "'");
    }
    rules.delta.scale = Get<double>(d, "scale", rules.delta.scale);
    rules.delta.ratio = Get<double>(d, "ratio", rules.delta.ratio);
  }
  if (j.contains("p_rule")) {
    const Json& d = j.at("p_rule");
    const std::string kind = Get<std::string>(d, "kind", "geometric");
    if (kind == "geometric") {
      rules.p.kind = PRule::Kind::kGeometric;
    } else if (kind == "power") {
      rules.p.kind = PRule::Kind::kPower;
    } else if (kind == "constant") {
      rules.p.kind = PRule::Kind::kConstant;
    } else {
      throw InvalidInputError("unknown p_rule kind '" + kind + "'");
    }
    rules.p.first = Get<double>(d, "first", rules.p.first);
    rules.p.ratio = Get<double>(d, "ratio", rules.p.ratio);
    rules.p.exponent = Get<double>(d, "exponent", rules.p.exponent);
  }
  if (j.contains("free_length_rule")) {
    const Json& d = j.at("free_length_rule");
    const std::string kind = Get<std::string>(d, "kind", "power");
    if (kind == "power") {
      rules.free_length.kind = FreeLengthRule::Kind::kPower;
    } else if (kind == "linear") {
      rules.free_length.kind = FreeLengthRule::Kind::kLinear;
    } else {
      throw InvalidInputError("unknown free_length_rule kind '" + kind + "'");
    }
    rules.free_length.exponent =
        Get<double>(d, "exponent", rules.free_length.exponent);
    rules.free_length.factor = Get<double>(d, "factor", rules.free_length.factor);
  }
  return rules;
}

AgentConfig AgentConfigFromJson(const Json& j, const Game& game, int agent) {
  AgentConfig cfg;
  const std::string policy = Get<std::string>(j, "policy", "lambda");
  if (policy == "lambda") {
    cfg.policy = AgentPolicy::kLambda;
  } else if (policy == "pure-learner") {
    cfg.policy = AgentPolicy::kPureLearner;
  } else {
    throw InvalidInputError("unknown policy '" + policy + "'");
  }
  if (j.contains("learner")) {
    const Json& l = j.at("learner");
    cfg.learner.name = Get<std::string>(l, "name", "uniform");
    if (l.contains("params")) {
      for (const auto& [key, value] : l.at("params").items()) {
        cfg.learner.params[key] = ParseProbability(value);
      }
    }
  }
  MakeLearner(cfg.learner, game, agent);
  if (j.contains("fallback") && !j.at("fallback").is_null()) {
    cfg.fallback = MixedFromJson(j.at("fallback"));
    if (static_cast<int>(cfg.fallback->size()) != game.action_count(agent)) {
      throw InvalidInputError("fallback of agent " + std::to_string(agent) +
                              " has the wrong number of actions");
    }
  }
  return cfg;
}

RunConfig RunConfigFromJson(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw InvalidInputError("config must be a JSON object");
  RunConfig cfg;
  auto resolve = [&](const std::string& p) -> fs::path {
    if (p.empty()) return {};
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  cfg.game = resolve(Get<std::string>(j, "game", ""));
  cfg.strategy = resolve(Get<std::string>(j, "strategy", ""));
  cfg.p = Get<double>(j, "p", cfg.p);
  cfg.delta_hat = Get<double>(j, "delta_hat", cfg.delta_hat);
  cfg.mc_samples = Get<std::int64_t>(j, "mc_samples", cfg.mc_samples);
  cfg.seed = Get<std::uint64_t>(j, "seed", cfg.seed);
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw InvalidInputError("p must be in (0, 1)");
  if (!(cfg.delta_hat > 0.0)) throw InvalidInputError("delta_hat must be > 0");
  if (j.contains("schedule")) {
    const Json& s = j.at("schedule");
    cfg.rules = ScheduleRulesFromJson(s);
    cfg.horizon = Get<int>(s, "horizon", cfg.horizon);
    cfg.test_lengths =
        Get<std::vector<std::int64_t>>(s, "test_lengths", cfg.test_lengths);
    cfg.free_lengths =
        Get<std::vector<std::int64_t>>(s, "free_lengths", cfg.free_lengths);
    if (cfg.test_lengths.size() != cfg.free_lengths.size()) {
      throw InvalidInputError("test_lengths and free_lengths differ in size");
    }
  }
  if (cfg.horizon < 1) throw InvalidInputError("horizon must be >= 1");
  if (!cfg.game.empty() && j.contains("agents")) {
    const Game game = LoadGame(cfg.game);
    const Json& arr = j.at("agents");
    if (!arr.is_array() || static_cast<int>(arr.size()) != game.num_agents()) {
      throw InvalidInputError("agents needs one entry per agent");
    }
    for (int i = 0; i < game.num_agents(); ++i) {
      cfg.agents.push_back(
          AgentConfigFromJson(arr[static_cast<std::size_t>(i)], game, i));
    }
  }
  cfg.rounds = Get<std::int64_t>(j, "rounds", cfg.rounds);
  cfg.seeds = Get<std::vector<std::uint64_t>>(j, "seeds", cfg.seeds);
  cfg.out = resolve(Get<std::string>(j, "out", ""));
  return cfg;
}

RunConfig LoadRunConfig(const fs::path& path) {
  try {
    return RunConfigFromJson(ReadJsonFile(path), path.parent_path());
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

Json PlanToJson(const TestPlan& plan) {
  Json j;
  j["p"] = plan.p_target;
  j["alpha"] = plan.alpha;
  j["critical_value"] = plan.critical_value;
  j["delta_hat"] = plan.delta_hat;
  j["psi"] = JsonNumberOrNull(plan.psi);
  j["psi_se"] = JsonNumberOrNull(plan.psi_std_error);
  j["beta"] = plan.beta;
  j["sample_size"] = plan.sample_size;
  j["df_total"] = plan.df_total;
  j["zero_cells"] = plan.zero_cells;
  j["p_zero_cell"] = JsonNumberOrNull(plan.p_zero_cell);
  return j;
}

Json DecisionToJson(const Decision& d) {
  Json j;
  j["outcome"] = OutcomeName(d.outcome);
  j["statistic"] = d.statistic ? Json(*d.statistic) : Json(nullptr);
  j["p_value"] = d.p_value ? Json(*d.p_value) : Json(nullptr);
  return j;
}

Json CeVerdictToJson(const CeVerdict& verdict) {
  Json j;
  j["correlated_equilibrium"] = verdict.is_equilibrium;
  j["violating_agents"] = verdict.ViolatingAgents();
  Json v = Json::array();
  for (const CeViolation& x : verdict.violations) {
    v.push_back({{"agent", x.agent},
                 {"signal", x.signal},
                 {"deviation", x.deviation},
                 {"gap", x.gap}});
  }
  j["violations"] = v;
  return j;
}

std::string ScheduleCsv(const Schedule& schedule) {
  std::ostringstream out;
  out << "kind,j,begin,length,delta,p,alpha,beta,psi,l_T\n";
  for (const Phase& ph : schedule.phases()) {
    out << (ph.is_test() ? "R" : "F") << ',' << ph.index << ',' << ph.begin
        << ',' << ph.length;
    if (ph.is_test()) {
      const TestPlan& plan = schedule.plan(ph.index);
      out << ',' << FormatDouble(plan.delta_hat) << ','
          << FormatDouble(plan.p_target) << ',' << FormatDouble(plan.alpha)
          << ',' << FormatDouble(plan.beta) << ',' << FormatDouble(plan.psi)
          << ',' << plan.sample_size;
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string TranscriptCsv(const Transcript& tr, const Game& game) {
  const ActionSpace& space = game.space();
  const int n = game.num_agents();
  std::ostringstream out;
  out << "t,phase";
  for (int i = 0; i < n; ++i) out << ",signal_" << i;
  for (int i = 0; i < n; ++i) out << ",action_" << i;
  for (int i = 0; i < n; ++i) out << ",utility_" << i;
  out << '\n';
  for (const RoundRecord& r : tr.rounds) {
    out << r.t << ',' << tr.phases[r.phase].Label();
    for (int i = 0; i < n; ++i) out << ',' << space.ActionOf(r.signal, i);
    for (int i = 0; i < n; ++i) out << ',' << space.ActionOf(r.action, i);
    for (int i = 0; i < n; ++i) out << ',' << FormatDouble(game.utility(r.action, i));
    out << '\n';
  }
  return out.str();
}

Json TranscriptSummary(const Transcript& tr, const Game& game,
                       const CorrelatedStrategy& sigma_m) {
  const int n = game.num_agents();
  const std::int64_t played = static_cast<std::int64_t>(tr.rounds.size());
  Json j;
  j["seed"] = tr.seed;
  j["rounds"] = played;
  Json fallbacks = Json::array();
  for (const MixedStrategy& f : tr.fallbacks) {
    fallbacks.push_back(std::vector<double>(f.probs().begin(), f.probs().end()));
  }
  j["fallbacks"] = fallbacks;
  Json decisions = Json::array();
  for (const DecisionRecord& d : tr.decisions) {
    Json x = DecisionToJson(d.decision);
    x["agent"] = d.agent;
    x["test"] = d.test;
    decisions.push_back(x);
  }
  j["decisions"] = decisions;
  Json phases = Json::array();
  for (std::size_t k = 0; k < tr.phases.size(); ++k) {
    const Phase& ph = tr.phases[k];
    const std::int64_t covered =
        std::max<std::int64_t>(0, std::min(ph.last(), played) - ph.begin + 1);
    Json x;
    x["phase"] = ph.Label();
    x["begin"] = ph.begin;
    x["length"] = ph.length;
    x["played"] = covered;
    Json avg = Json::array();
    for (int i = 0; i < n; ++i) {
      avg.push_back(covered > 0 ? Json(tr.ledger.Segment(i, k) /
                                       static_cast<double>(covered))
                                : Json(nullptr));
    }
    x["average_utility"] = avg;
    phases.push_back(x);
  }
  j["phases"] = phases;
  Json overall = Json::array();
  Json free_only = Json::array();
  for (int i = 0; i < n; ++i) {
    if (played == 0) {
      overall.push_back(nullptr);
      free_only.push_back(nullptr);
      continue;
    }
    overall.push_back(AverageUtility(tr.ledger, i, played));
    try {
      free_only.push_back(FreePeriodAverageUtility(tr.ledger, i, played));
    } catch (const NoDataError&) {
      free_only.push_back(nullptr);
    }
  }
  j["average_utility"] = overall;
  j["free_period_average_utility"] = free_only;
  j["free_period_tv"] = FreePeriodTvDistances(tr, sigma_m);
  return j;
}

std::string Fnv1aHex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void WriteManifest(const fs::path& dir, std::string_view command,
                   std::string_view config_hash, std::uint64_t seed,
                   const std::vector<std::string>& outputs) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
  Json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["outputs"] = outputs;
  j["created_at"] = stamp;
  WriteTextFile(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace cetest
