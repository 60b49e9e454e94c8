#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dustlab/cli.hpp"
#include "dustlab/functional.hpp"
#include "dustlab/io.hpp"
#include "dustlab/riccati.hpp"
#include "dustlab/simulation.hpp"

namespace py = pybind11;
using namespace dustlab;
using io::Json;

// Structured values cross the boundary as JSON text; the Python package
// turns them into dicts.
namespace {

ValidatedScenario parse(const std::string& text) { return validate_scenario(io::scenario_from_json(Json::parse(text))); }

Json trajectory_json(const Trajectory& t, const ValidatedScenario& vs) {
  Json j;
  Json rows = Json::array();
  for (const auto& d : t.diagnostics) rows.push_back(io::to_json(d));
  j["diagnostics"] = rows;
  j["event"] = t.event ? io::to_json(*t.event) : Json(nullptr);
  const auto cert = cli::certify_scenario(vs);
  j["certificate"] = io::to_json(cert);
  j["report"] = io::to_json(detector::escape_report(t, vs.scenario().v_sup, cert));
  j["accepted_steps"] = t.steps.size();
  j["rejected_steps"] = t.rejected_steps;
  j["final_time"] = t.final_time();
  Json markers = Json::array();
  for (const auto& m : t.steps.back().markers)
    markers.push_back({{"position", m.position}, {"velocity", m.velocity}, {"density", m.density},
                       {"eig_radial", m.eig_radial}, {"eig_tangential", m.eig_tangential},
                       {"mass_weight", m.mass_weight}});
  j["final_markers"] = markers;
  return j;
}

} // namespace

PYBIND11_MODULE(_dustlab, m) {
  m.doc() = "Lagrangian dust-collapse laboratory (C++ core)";
  m.attr("__version__") = cli::tool_version();

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<Error>(m, "DustlabError", PyExc_RuntimeError);

  m.def("validate", [](const std::string& text) { return io::scenario_to_json(parse(text).scenario()).dump(); },
        "Validate a scenario JSON document; returns the normalized document.");
  m.def(
      "simulate",
      [](const std::string& text) {
        const auto vs = parse(text);
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = simulate(vs);
        }
        return trajectory_json(t, vs).dump();
      },
      "Integrate a scenario; returns diagnostics, event, certificate and report.");
  m.def("certify", [](const std::string& text) { return io::to_json(cli::certify_scenario(parse(text))).dump(); });
  m.def("verify", [](const std::string& text) {
    const auto vs = parse(text);
    Trajectory t;
    {
      py::gil_scoped_release release;
      t = simulate(vs);
    }
    return io::to_json(functional::proof_chain_report(t)).dump();
  });
  m.def(
      "sweep",
      [](const std::string& text, const std::string& axis, const std::vector<double>& values, int jobs) {
        if (axis != "lambda" && axis != "h0") throw py::value_error("axis must be 'lambda' or 'h0'");
        const auto vs = parse(text);
        std::vector<cli::SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = cli::sweep(vs, axis == "lambda" ? cli::SweepAxis::Lambda : cli::SweepAxis::H0, values, jobs);
        }
        Json out = Json::array();
        for (const auto& r : rows) {
          out.push_back({{"value", r.value},
                         {"case", to_string(r.certificate_case)},
                         {"t_bound", r.t_bound ? Json(*r.t_bound) : Json(nullptr)},
                         {"event_time", r.event_time ? Json(*r.event_time) : Json(nullptr)},
                         {"escape", r.escape ? Json(*r.escape) : Json(nullptr)},
                         {"error", r.error ? Json(*r.error) : Json(nullptr)}});
        }
        return out.dump();
      },
      py::arg("scenario"), py::arg("axis"), py::arg("values"), py::arg("jobs") = 1);

  m.def("check_blowup_conditions",
        [](double mass, double v_sup, double lambda, int dimension, double h0) {
          return io::to_json(riccati::check_blowup_conditions(mass, v_sup, lambda, dimension, h0)).dump();
        },
        py::arg("mass"), py::arg("v_sup"), py::arg("lam"), py::arg("dimension"), py::arg("h0"));
  m.def(
      "blowup_time_upper_bound",
      [](double mass, double v_sup, double lambda, int dimension, double h0) {
        return riccati::blowup_time_upper_bound(riccati::make_params(mass, v_sup, lambda, dimension, h0));
      },
      py::arg("mass"), py::arg("v_sup"), py::arg("lam"), py::arg("dimension"), py::arg("h0"));
  m.def(
      "comparison_solution",
      [](double a, double b, double h0, double t) { return riccati::comparison_solution({a, b, h0}, t); },
      py::arg("a"), py::arg("b"), py::arg("h0"), py::arg("t"));
  m.def(
      "oracle_pole",
      [](double a, double b, double h0, double until) -> std::optional<std::pair<double, double>> {
        const auto path = riccati::integrate_comparison_ode({a, b, h0}, until);
        if (!path.pole) return std::nullopt;
        return std::make_pair(path.pole->lo, path.pole->hi);
      },
      py::arg("a"), py::arg("b"), py::arg("h0"), py::arg("until"),
      "Pole bracket of y' = -a y^2 - b from brute-force integration, or None.");
}
