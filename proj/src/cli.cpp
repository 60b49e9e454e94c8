#include "dustlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dustlab/functional.hpp"
#include "dustlab/io.hpp"
#include "dustlab/riccati.hpp"
#include "dustlab/simulation.hpp"

#ifndef DUSTLAB_VERSION
#define DUSTLAB_VERSION "dev"
#endif

namespace dustlab::cli {

using io::Json;

const char* to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Certify: return "certify";
    case Command::Verify: return "verify";
    case Command::Sweep: return "sweep";
  }
  return "unknown";
}

std::string tool_version() { return "dustlab " DUSTLAB_VERSION; }

std::vector<double> Grid::values() const {
  std::vector<double> out;
  if (count == 1) return {first};
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(first + (last - first) * i / (count - 1));
  return out;
}

Grid parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw std::invalid_argument("grid must look like a:b:n, got '" + spec + "'");
  Grid g;
  std::size_t used = 0;
  try {
    g.first = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("trailing characters");
    g.last = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("trailing characters");
    g.count = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("grid must look like a:b:n, got '" + spec + "'");
  }
  if (g.count < 1) throw std::invalid_argument("grid needs n >= 1");
  return g;
}

BlowupCertificate certify_scenario(const ValidatedScenario& scenario) {
  const Snapshot snap = initial_snapshot(scenario);
  const Scenario& s = scenario.scenario();
  return riccati::check_blowup_conditions(functional::total_mass(snap), s.v_sup, s.lambda, s.dimension,
                                          functional::weighted_divergence_functional(snap));
}

Scenario with_initial_functional(const ValidatedScenario& base, double h0) {
  Scenario s = base.scenario();
  if (s.velocity.kind == VelocityKind::Table)
    throw Error(ErrorCode::BadInput, "h0 sweeps need a zero or Hubble velocity profile");
  const double mass = functional::total_mass(initial_snapshot(base));
  // Hubble flow has div u = N * rate everywhere, so H(0) = N * rate * M.
  s.velocity.kind = VelocityKind::Hubble;
  s.velocity.rate = h0 / (s.dimension * mass);
  return s;
}

int exit_code_for(detector::EscapeKind kind) {
  switch (kind) {
    case detector::EscapeKind::SupportEscaped: return kHypothesisViolated;
    case detector::EscapeKind::Contradiction: return kContradiction;
    default: return kSuccess;
  }
}

namespace {

Json manifest_json(const RunManifest& m) {
  Json j;
  j["tool_version"] = m.tool_version.empty() ? tool_version() : m.tool_version;
  j["command"] = to_string(m.command);
  j["scenario"] = m.scenario_path.generic_string();
  j["deterministic"] = m.deterministic;
  auto grid = [](const std::optional<Grid>& g) {
    return g ? Json{{"first", g->first}, {"last", g->last}, {"count", g->count}} : Json(nullptr);
  };
  j["lambda_grid"] = grid(m.lambda_grid);
  j["h0_grid"] = grid(m.h0_grid);
  return j;
}

std::string manifest_comment(const RunManifest& m) { return "# " + manifest_json(m).dump() + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::BadInput, "cannot write " + path.string());
  os << text;
}

void write_json(const std::filesystem::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

ValidatedScenario load(const RunManifest& m) {
  std::filesystem::create_directories(m.output_dir);
  return validate_scenario(io::load_scenario(m.scenario_path));
}

Json oracle_cross_check(const BlowupCertificate& cert) {
  Json j;
  if (!cert.t_bound) {
    j["status"] = "not_applicable";
    return j;
  }
  const auto& in = cert.inputs;
  const auto params = riccati::make_params(in.mass, in.v_sup, in.lambda, in.dimension, in.h0);
  const double bound = *cert.t_bound;
  const auto path = riccati::integrate_comparison_ode(params, 2.0 * bound + 1.0);
  if (!path.pole) {
    j["status"] = "disagrees";
    j["detail"] = "oracle found no pole";
    return j;
  }
  const double mid = 0.5 * (path.pole->lo + path.pole->hi);
  const double diff = std::abs(mid - bound);
  j["status"] = diff <= 1e-6 * std::max(1.0, bound) ? "agrees" : "disagrees";
  j["pole_bracket"] = {path.pole->lo, path.pole->hi};
  j["abs_difference"] = diff;
  return j;
}

Json pointwise_bounds(const ValidatedScenario& vs) {
  const Scenario& s = vs.scenario();
  Json j;
  if (s.lambda != 0.0) {
    j["applicable"] = false;
    return j;
  }
  j["applicable"] = true;
  std::size_t count = 0;
  std::optional<double> best;
  std::size_t best_marker = 0;
  const auto markers = initial_markers(vs);
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (auto t = riccati::chae_tadmor_pointwise_bound(markers[i], s.dimension)) {
      ++count;
      if (!best || *t < *best) {
        best = *t;
        best_marker = i;
      }
    }
  }
  j["markers_in_condition_set"] = count;
  j["earliest_bound"] = best ? Json(*best) : Json(nullptr);
  j["earliest_marker"] = best ? Json(best_marker) : Json(nullptr);
  return j;
}

struct RunOutcome {
  Trajectory trajectory;
  BlowupCertificate certificate;
  detector::EscapeReport escape;
};

RunOutcome run_scenario(const ValidatedScenario& vs) {
  RunOutcome r{simulate(vs), certify_scenario(vs), {}};
  r.escape = detector::escape_report(r.trajectory, vs.scenario().v_sup, r.certificate);
  return r;
}

void write_run_files(const RunManifest& m, const ValidatedScenario& vs, const RunOutcome& r) {
  {
    std::ostringstream os;
    os << manifest_comment(m);
    io::write_diagnostics_csv(os, r.trajectory);
    write_text(m.output_dir / "diagnostics.csv", os.str());
  }
  {
    std::ostringstream os;
    os << manifest_comment(m);
    io::write_markers_csv(os, r.trajectory);
    write_text(m.output_dir / "markers.csv", os.str());
  }
  if (r.trajectory.event) {
    Json ev;
    ev["manifest"] = manifest_json(m);
    ev["event"] = io::to_json(*r.trajectory.event);
    write_json(m.output_dir / "event.json", ev);
  }
  Json run;
  run["manifest"] = manifest_json(m);
  run["scenario"] = io::scenario_to_json(vs.scenario());
  run["accepted_steps"] = r.trajectory.steps.size();
  run["rejected_steps"] = r.trajectory.rejected_steps;
  run["final_time"] = r.trajectory.final_time();
  run["event"] = r.trajectory.event ? io::to_json(*r.trajectory.event) : Json(nullptr);
  run["certificate"] = io::to_json(r.certificate);
  run["escape_report"] = io::to_json(r.escape);
  write_json(m.output_dir / "run.json", run);
}

void print_run_summary(std::ostream& out, const RunOutcome& r) {
  const auto& t = r.trajectory;
  out << "steps: " << t.steps.size() << " accepted, " << t.rejected_steps << " rejected; final t = "
      << io::format_double(t.final_time()) << '\n';
  if (t.event) {
    out << "event: " << to_string(t.event->trigger) << " at marker " << t.event->marker_index << ", t in ["
        << io::format_double(t.event->t_lo) << ", " << io::format_double(t.event->t_hi) << "]\n";
  } else {
    out << "event: none\n";
  }
  out << "certificate: " << to_string(r.certificate.certificate_case);
  if (r.certificate.t_bound) out << ", T_bound = " << io::format_double(*r.certificate.t_bound);
  out << '\n' << "report: " << r.escape.message << '\n';
}

} // namespace

int run_simulate(const RunManifest& m, std::ostream& out) {
  const auto vs = load(m);
  const auto r = run_scenario(vs);
  write_json(m.output_dir / "manifest.json", manifest_json(m));
  write_run_files(m, vs, r);
  print_run_summary(out, r);
  return exit_code_for(r.escape.kind);
}

int run_certify(const RunManifest& m, std::ostream& out) {
  const auto vs = load(m);
  const auto cert = certify_scenario(vs);
  const auto vort = initial_vorticity_satisfied(vs);
  Json doc;
  doc["manifest"] = manifest_json(m);
  doc["scenario"] = vs.scenario().name;
  doc["vorticity_hypothesis"] = {{"satisfied", vort.satisfied}, {"explanation", vort.explanation}};
  doc["certificate"] = io::to_json(cert);
  if (cert.boundary_extension)
    doc["note"] = "boundary extension (Lambda == M/V_sup, h0 < 0): not one of the strict conditions";
  doc["oracle_cross_check"] = oracle_cross_check(cert);
  doc["pointwise_bounds"] = pointwise_bounds(vs);
  write_json(m.output_dir / "certificate.json", doc);

  out << "certificate: " << to_string(cert.certificate_case);
  if (cert.t_bound) out << ", T_bound = " << io::format_double(*cert.t_bound);
  out << " (M = " << io::format_double(cert.inputs.mass) << ", H(0) = " << io::format_double(cert.inputs.h0)
      << ")\n";
  return kSuccess;
}

int run_verify(const RunManifest& m, std::ostream& out) {
  const auto vs = load(m);
  const auto r = run_scenario(vs);
  const auto report = functional::proof_chain_report(r.trajectory);
  Json doc;
  doc["manifest"] = manifest_json(m);
  doc["certificate"] = io::to_json(r.certificate);
  doc["escape_report"] = io::to_json(r.escape);
  doc["event"] = r.trajectory.event ? io::to_json(*r.trajectory.event) : Json(nullptr);
  const Json body = io::to_json(report);
  doc["summary"] = body["summary"];
  doc["records"] = body["records"];
  write_json(m.output_dir / "proof_chain.json", doc);
  const std::string summary = io::proof_chain_summary(report, r.trajectory);
  write_text(m.output_dir / "proof_chain_summary.txt", summary + "report: " + r.escape.message + "\n");
  out << summary << "report: " << r.escape.message << '\n';
  if (report.first_violation_time) return kNumericFailure;
  return exit_code_for(r.escape.kind);
}

std::vector<SweepRow> sweep(const ValidatedScenario& base, SweepAxis axis, const std::vector<double>& values,
                            int jobs) {
  std::vector<SweepRow> rows(values.size());
  auto work = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    try {
      Scenario s = axis == SweepAxis::Lambda ? base.scenario() : with_initial_functional(base, values[i]);
      if (axis == SweepAxis::Lambda) s.lambda = values[i];
      const auto vs = validate_scenario(s);
      const Snapshot snap = initial_snapshot(vs);
      const double mass = functional::total_mass(snap);
      // The h0 axis certifies the requested grid value itself so the
      // threshold comparison is exact.
      const double h0 = axis == SweepAxis::H0 ? values[i] : functional::weighted_divergence_functional(snap);
      const auto cert = riccati::check_blowup_conditions(mass, s.v_sup, s.lambda, s.dimension, h0);
      row.certificate_case = cert.certificate_case;
      row.t_bound = cert.t_bound;
      const auto traj = simulate(vs);
      for (const auto& d : traj.diagnostics) row.max_support_volume = std::max(row.max_support_volume, d.support_volume);
      if (traj.event) {
        row.event_time = traj.event->t_hi;
        row.event_trigger = to_string(traj.event->trigger);
      }
      row.escape = detector::to_string(detector::escape_report(traj, s.v_sup, cert).kind);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs < 1 ? 1 : static_cast<std::size_t>(jobs), 1, values.size() ? values.size() : 1);
  if (workers == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) work(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < values.size(); i = next++) work(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

int run_sweep(const RunManifest& m, std::ostream& out) {
  if (m.lambda_grid.has_value() == m.h0_grid.has_value())
    throw Error(ErrorCode::BadInput, "sweep needs exactly one of --lambda-grid or --h0-grid");
  const auto vs = load(m);
  const SweepAxis axis = m.lambda_grid ? SweepAxis::Lambda : SweepAxis::H0;
  const auto values = (m.lambda_grid ? *m.lambda_grid : *m.h0_grid).values();
  const auto rows = sweep(vs, axis, values, m.jobs);

  std::ostringstream os;
  os << manifest_comment(m);
  os << (axis == SweepAxis::Lambda ? "lambda" : "h0")
     << ",case,t_bound,event_time,event_trigger,max_support_volume,escape,error\n";
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  auto quote = [](const std::optional<std::string>& s) {
    if (!s) return std::string();
    std::string q = "\"";
    for (char c : *s) q += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
    return q + "\"";
  };
  bool contradiction = false;
  for (const auto& r : rows) {
    os << io::format_double(r.value) << ',' << to_string(r.certificate_case) << ',' << opt(r.t_bound) << ','
       << opt(r.event_time) << ',' << r.event_trigger.value_or("") << ',' << io::format_double(r.max_support_volume)
       << ',' << r.escape.value_or("") << ',' << quote(r.error) << '\n';
    if (r.escape && *r.escape == "Contradiction") contradiction = true;
  }
  write_text(m.output_dir / "sweep.csv", os.str());
  out << "sweep: " << rows.size() << " rows written to " << (m.output_dir / "sweep.csv").string() << '\n';
  return contradiction ? kContradiction : kSuccess;
}

int run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    switch (m.command) {
      case Command::Simulate: return run_simulate(m, out);
      case Command::Certify: return run_certify(m, out);
      case Command::Verify: return run_verify(m, out);
      case Command::Sweep: return run_sweep(m, out);
    }
  } catch (const ValidationError& e) {
    err << e.what() << '\n';
    return kValidation;
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::StepUnderflow:
      case ErrorCode::MaxStepsExceeded:
      case ErrorCode::BracketStall:
      case ErrorCode::PreconditionViolated: return kNumericFailure;
      default: return kValidation;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kValidation;
}

} // namespace dustlab::cli
