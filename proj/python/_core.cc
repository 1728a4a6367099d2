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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cetest/chi2.h"
#include "cetest/error.h"
#include "cetest/game.h"
#include "cetest/io.h"
#include "cetest/schedule.h"
#include "cetest/sim.h"
#include "cetest/verifier.h"

namespace py = pybind11;
using namespace cetest;

namespace {

std::vector<double> ToVector(std::span<const double> s) { return {s.begin(), s.end()}; }

PlanOptions Options(std::int64_t mc_samples, std::uint64_t seed) {
  PlanOptions o;
  o.mc_samples = mc_samples;
  o.seed = seed;
  return o;
}

// JSON text; the Python layer parses it.
std::string Dump(const Json& j) { return j.dump(); }

std::vector<AgentConfig> AgentsFromJson(const std::string& text, const Game& game) {
  std::vector<AgentConfig> agents;
  if (text.empty()) return std::vector<AgentConfig>(static_cast<std::size_t>(game.num_agents()));
  const Json j = Json::parse(text);
  if (!j.is_array()) throw InvalidInputError("agents must be a JSON array");
  for (std::size_t i = 0; i < j.size(); ++i) {
    agents.push_back(AgentConfigFromJson(j[i], game, static_cast<int>(i)));
  }
  return agents;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Correlated-equilibrium verification by sampling tests";

  auto invalid = py::register_exception<InvalidInputError>(m, "InvalidInputError",
                                                           PyExc_ValueError);
  py::register_exception<UndefinedConditionalError>(m, "UndefinedConditionalError",
                                                    PyExc_ValueError);
  auto infeasible = py::register_exception<InfeasiblePlanError>(m, "InfeasiblePlanError",
                                                               PyExc_RuntimeError);
  py::register_exception<InfeasibleScheduleError>(m, "InfeasibleScheduleError",
                                                  infeasible.ptr());
  py::register_exception<HorizonExceededError>(m, "HorizonExceededError", PyExc_IndexError);
  py::register_exception<NoDataError>(m, "NoDataError", PyExc_RuntimeError);
  (void)invalid;

  py::class_<Game>(m, "Game")
      .def(py::init<std::vector<int>, std::vector<double>,
                    std::vector<std::vector<std::string>>>(),
           py::arg("action_counts"), py::arg("utilities"),
           py::arg("action_names") = std::vector<std::vector<std::string>>{})
      .def_property_readonly("num_agents", &Game::num_agents)
      .def_property_readonly("action_counts", &Game::action_counts)
      .def_property_readonly("num_joint_actions", &Game::num_joint_actions)
      .def_property_readonly("utilities", [](const Game& g) { return ToVector(g.utilities()); })
      .def("utility", &Game::utility, py::arg("joint_action"), py::arg("agent"))
      .def("encode",
           [](const Game& g, const std::vector<int>& a) { return g.space().Index(a); })
      .def("decode", [](const Game& g, JointIndex a) { return g.space().Decode(a); });

  py::class_<CorrelatedStrategy>(m, "CorrelatedStrategy")
      .def(py::init([](const Game& g, std::vector<double> probs) {
             return CorrelatedStrategy(g.space(), std::move(probs));
           }),
           py::arg("game"), py::arg("probs"))
      .def_property_readonly("probs",
                             [](const CorrelatedStrategy& s) { return ToVector(s.probs()); });

  m.def("load_game", [](const std::string& path) { return LoadGame(path); });
  m.def("load_strategy", [](const std::string& path, const Game& g) {
    return LoadStrategy(path, g.space());
  });

  m.def("_check_ce", [](const Game& g, const CorrelatedStrategy& s, double tol) {
    return Dump(CeVerdictToJson(CheckCorrelatedEquilibrium(g, s, tol)));
  }, py::arg("game"), py::arg("sigma"), py::arg("tolerance") = kDefaultCeTolerance);

  m.def("chi2_cdf", &Chi2Cdf, py::arg("x"), py::arg("df"));
  m.def("chi2_sf", &Chi2Sf, py::arg("x"), py::arg("df"));
  m.def("chi2_quantile", &Chi2Quantile, py::arg("p"), py::arg("df"));
  m.def("noncentral_chi2_cdf", &NoncentralChi2Cdf, py::arg("x"), py::arg("df"),
        py::arg("ncp"));
  m.def("power_beta", [](double alpha, double delta_hat, int df, std::int64_t n) {
    return PowerBeta({alpha, delta_hat, df, n});
  }, py::arg("alpha"), py::arg("delta_hat"), py::arg("df"), py::arg("sample_size"));
  m.def("sample_size", &SampleSize, py::arg("alpha"), py::arg("beta"), py::arg("delta_hat"),
        py::arg("df"));

  m.def("pearson_statistic",
        [](const std::vector<std::int64_t>& counts, const CorrelatedStrategy& s,
           std::int64_t n) -> py::object {
          const PearsonResult r = PearsonStatistic(counts, s, n);
          if (r.zero_cell_violation()) return py::none();
          return py::float_(r.statistic);
        },
        py::arg("counts"), py::arg("sigma"), py::arg("sample_size"));
  m.def("sensitivity_delta",
        [](const std::vector<double>& m_, const std::vector<double>& t) {
          return SensitivityDelta<double>(m_, t);
        },
        py::arg("sigma_m"), py::arg("sigma_tilde"));
  m.def("estimate_psi",
        [](const Game& g, const CorrelatedStrategy& s, double delta_hat,
           std::int64_t mc_samples, std::uint64_t seed) {
          const PsiEstimate e = EstimatePsi(g, s, delta_hat, mc_samples, seed);
          return py::make_tuple(e.psi, e.std_error);
        },
        py::arg("game"), py::arg("sigma"), py::arg("delta_hat"),
        py::arg("mc_samples") = kDefaultPsiSamples, py::arg("seed") = 0);

  m.def("_plan_test",
        [](const Game& g, const CorrelatedStrategy& s, double p, double delta_hat,
           std::int64_t mc_samples, std::uint64_t seed) {
          return Dump(PlanToJson(PlanTest(g, s, p, delta_hat, Options(mc_samples, seed))));
        },
        py::arg("game"), py::arg("sigma"), py::arg("p"), py::arg("delta_hat"),
        py::arg("mc_samples"), py::arg("seed"));
  m.def("_decide",
        [](const Game& g, const CorrelatedStrategy& s, const std::vector<std::int64_t>& counts,
           double alpha) {
          std::int64_t n = 0;
          for (std::int64_t c : counts) n += c;
          const TestPlan plan = DecisionPlan(s, alpha, n);
          Json out = Json::array();
          for (int i = 0; i < g.num_agents(); ++i) {
            out.push_back(DecisionToJson(RunSamplingDecision(plan, g, s, i, counts)));
          }
          return Dump(out);
        },
        py::arg("game"), py::arg("sigma"), py::arg("counts"), py::arg("alpha"));
  m.def("_schedule",
        [](const Game& g, const CorrelatedStrategy& s, int horizon, std::int64_t mc_samples,
           std::uint64_t seed, int validate_prefix) {
          const Schedule sch = BuildSchedule(g, s, ScheduleRules{}, horizon,
                                             Options(mc_samples, seed));
          py::dict out;
          out["csv"] = ScheduleCsv(sch);
          if (validate_prefix > 0) {
            out["valid"] = ValidateSchedule(sch, validate_prefix).all_passed();
          }
          return out;
        },
        py::arg("game"), py::arg("sigma"), py::arg("horizon"), py::arg("mc_samples"),
        py::arg("seed"), py::arg("validate_prefix") = 0);
  m.def("_simulate",
        [](const Game& g, const CorrelatedStrategy& s, const std::vector<std::int64_t>& tests,
           const std::vector<std::int64_t>& frees, const std::string& agents,
           std::uint64_t seed, std::int64_t rounds) {
          const Schedule sch = BuildFixedLengthSchedule(s, tests, frees);
          const Transcript tr = RunGame(g, s, sch, AgentsFromJson(agents, g), seed, rounds);
          py::dict out;
          out["summary"] = Dump(TranscriptSummary(tr, g, s));
          out["transcript_csv"] = TranscriptCsv(tr, g);
          return out;
        },
        py::arg("game"), py::arg("sigma"), py::arg("test_lengths"), py::arg("free_lengths"),
        py::arg("agents"), py::arg("seed"), py::arg("rounds") = -1);
}
