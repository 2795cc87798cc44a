#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <stdexcept>

#include "emas/experiment.hpp"

namespace py = pybind11;
using namespace emas;

namespace {

std::vector<std::pair<double, double>> points(const std::vector<SeriesPoint>& s) {
  std::vector<std::pair<double, double>> out;
  out.reserve(s.size());
  for (const SeriesPoint& p : s) out.emplace_back(p.x, p.y);
  return out;
}

RunTrace run(const std::string& model, std::size_t islands, std::size_t population, std::size_t dimension,
             std::optional<std::uint64_t> steps, std::optional<long long> duration_ms, std::uint64_t seed,
             std::size_t units, double migration_probability, bool ledger) {
  if (steps && duration_ms) throw std::invalid_argument("give steps or duration_ms, not both");
  RunConfig cfg;
  cfg.problem = ProblemConfig::with_defaults(dimension, -50.0, 50.0);
  cfg.islands = islands;
  cfg.population_per_island = population;
  cfg.seed = seed;
  cfg.units = units;
  cfg.behaviour.migration_probability = migration_probability;
  cfg.ledger = ledger;
  cfg.run_id = model + "-py";
  if (steps)
    cfg.budget = StepBudget{*steps};
  else
    cfg.budget = std::chrono::milliseconds(duration_ms.value_or(1000));
  const Model m = parse_model(model);
  py::gil_scoped_release release;
  return run_model(m, cfg);
}

}  // namespace

PYBIND11_MODULE(_emas, m) {
  m.doc() = "Evolutionary multi-agent system engines";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("rastrigin", [](const std::vector<double>& x) { return rastrigin(x); }, py::arg("x"));

  py::class_<RunTrace>(m, "RunTrace")
      .def_readonly("run_id", &RunTrace::run_id)
      .def_property_readonly("model", [](const RunTrace& t) { return to_string(t.model); })
      .def_readonly("elapsed_ms", &RunTrace::elapsed_ms)
      .def_readonly("initial_energy", &RunTrace::initial_energy)
      .def_readonly("final_energy", &RunTrace::final_energy)
      .def_readonly("final_population", &RunTrace::final_population)
      .def_property_readonly("conserved", &RunTrace::conserved)
      .def_property_readonly("best", &RunTrace::best)
      .def_property_readonly("reproductions_per_second", &RunTrace::reproductions_per_second)
      .def_property_readonly("config", [](const RunTrace& t) { return t.config; })
      .def_property_readonly("best_fitness_series", [](const RunTrace& t) { return points(t.best_fitness_series); })
      .def_property_readonly("reproduction_cumulative",
                             [](const RunTrace& t) { return points(t.reproduction_cumulative); })
      .def_property_readonly("totals",
                             [](const RunTrace& t) {
                               py::dict d;
                               d["fights"] = t.totals.fights;
                               d["births"] = t.totals.births;
                               d["deaths"] = t.totals.deaths;
                               d["migrations"] = t.totals.migrations;
                               return d;
                             })
      .def("fitness_vs_reproductions", [](const RunTrace& t) { return points(fitness_vs_reproductions(t)); })
      .def("reproductions_to_target", &reproductions_to_target, py::arg("target"))
      .def("problems", &check_trace)
      .def(
          "csv",
          [](const RunTrace& t, bool ledger) {
            std::ostringstream out;
            write_trace_csv(out, t, ledger);
            return out.str();
          },
          py::arg("ledger") = false);

  m.def("run", &run, py::arg("model"), py::arg("islands") = 4, py::arg("population") = 50,
        py::arg("dimension") = 10, py::arg("steps") = py::none(), py::arg("duration_ms") = py::none(),
        py::arg("seed") = 1, py::arg("units") = 1, py::arg("migration_probability") = 0.01,
        py::arg("ledger") = false);

  m.def(
      "aggregate",
      [](const std::vector<RunTrace>& traces, double bucket_ms) {
        std::vector<ExperimentSummary> s;
        s.push_back(traces.size() == 1 ? summarize_single(traces.front(), bucket_ms) : aggregate(traces, bucket_ms));
        std::ostringstream out;
        write_summary_csv(out, s);
        return out.str();
      },
      py::arg("traces"), py::arg("bucket_ms") = 1000.0,
      "Summary CSV text for runs of one model and configuration.");
}
