#include "dustlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace dustlab::io {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw ValidationError({{ViolationKind::BadSettings, field, msg}});
}

void reject_unknown(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) bad(where + key, "unknown key");
  }
}

double number(const Json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) bad(where + key, "missing");
  if (!obj[key].is_number()) bad(where + key, "expected a number");
  return obj[key].get<double>();
}

double number_or(const Json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

std::vector<double> numbers(const Json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || !obj[key].is_array()) bad(where + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) bad(where + key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string text(const Json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) bad(where + key, "expected a string");
  return obj[key].get<std::string>();
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// NaN is not representable in JSON.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace

const char* geometry_name(Geometry g) { return g == Geometry::Slab1D ? "slab" : "radial"; }

Scenario scenario_from_json(const Json& doc) {
  if (!doc.is_object()) bad("", "scenario must be a JSON object");
  reject_unknown(doc, "", {"name", "geometry", "dimension", "lambda", "v_sup", "domain", "marker_count", "t_end",
                           "density", "velocity", "numerics", "snapshot_times"});
  Scenario s;
  if (doc.contains("name")) s.name = text(doc, "", "name");
  const std::string geometry = text(doc, "", "geometry");
  if (geometry == "slab") s.geometry = Geometry::Slab1D;
  else if (geometry == "radial") s.geometry = Geometry::RadialND;
  else bad("geometry", "expected \"slab\" or \"radial\"");
  s.dimension = static_cast<int>(number_or(doc, "", "dimension", s.geometry == Geometry::Slab1D ? 1 : 3));
  s.lambda = number_or(doc, "", "lambda", 0.0);
  s.v_sup = number(doc, "", "v_sup");
  const auto domain = numbers(doc, "", "domain");
  if (domain.size() != 2) bad("domain", "expected [lo, hi]");
  s.domain_lo = domain[0];
  s.domain_hi = domain[1];
  s.marker_count = static_cast<int>(number(doc, "", "marker_count"));
  s.t_end = number(doc, "", "t_end");

  if (!doc.contains("density") || !doc["density"].is_object()) bad("density", "expected an object");
  const Json& d = doc["density"];
  const std::string dk = text(d, "density.", "kind");
  if (dk == "uniform") {
    reject_unknown(d, "density.", {"kind", "value"});
    s.density.kind = DensityKind::Uniform;
    s.density.value = number(d, "density.", "value");
  } else if (dk == "gaussian") {
    reject_unknown(d, "density.", {"kind", "value", "width", "center"});
    s.density.kind = DensityKind::Gaussian;
    s.density.value = number(d, "density.", "value");
    s.density.width = number(d, "density.", "width");
    s.density.center = number_or(d, "density.", "center", 0.0);
  } else if (dk == "table") {
    reject_unknown(d, "density.", {"kind", "x", "rho"});
    s.density.kind = DensityKind::Table;
    s.density.nodes = numbers(d, "density.", "x");
    s.density.samples = numbers(d, "density.", "rho");
  } else {
    bad("density.kind", "expected uniform, gaussian or table");
  }

  if (doc.contains("velocity")) {
    const Json& v = doc["velocity"];
    if (!v.is_object()) bad("velocity", "expected an object");
    const std::string vk = text(v, "velocity.", "kind");
    if (vk == "zero") {
      reject_unknown(v, "velocity.", {"kind"});
      s.velocity.kind = VelocityKind::Zero;
    } else if (vk == "hubble") {
      reject_unknown(v, "velocity.", {"kind", "rate", "shift"});
      s.velocity.kind = VelocityKind::Hubble;
      s.velocity.rate = number(v, "velocity.", "rate");
      s.velocity.shift = number_or(v, "velocity.", "shift", 0.0);
    } else if (vk == "table") {
      reject_unknown(v, "velocity.", {"kind", "x", "u"});
      s.velocity.kind = VelocityKind::Table;
      s.velocity.nodes = numbers(v, "velocity.", "x");
      s.velocity.samples = numbers(v, "velocity.", "u");
    } else {
      bad("velocity.kind", "expected zero, hubble or table");
    }
  }

  if (doc.contains("numerics")) {
    const Json& n = doc["numerics"];
    if (!n.is_object()) bad("numerics", "expected an object");
    reject_unknown(n, "numerics.", {"rel_tol", "abs_tol", "div_blowup_threshold", "rho_blowup_threshold",
                                    "crossing_gap_threshold", "max_steps", "max_step", "output_interval"});
    auto& ns = s.numerics;
    ns.rel_tol = number_or(n, "numerics.", "rel_tol", ns.rel_tol);
    ns.abs_tol = number_or(n, "numerics.", "abs_tol", ns.abs_tol);
    ns.div_blowup_threshold = number_or(n, "numerics.", "div_blowup_threshold", ns.div_blowup_threshold);
    ns.rho_blowup_threshold = number_or(n, "numerics.", "rho_blowup_threshold", ns.rho_blowup_threshold);
    ns.crossing_gap_threshold = number_or(n, "numerics.", "crossing_gap_threshold", ns.crossing_gap_threshold);
    ns.max_steps = static_cast<std::int64_t>(number_or(n, "numerics.", "max_steps", double(ns.max_steps)));
    ns.max_step = number_or(n, "numerics.", "max_step", ns.max_step);
    ns.output_interval = number_or(n, "numerics.", "output_interval", ns.output_interval);
  }
  if (doc.contains("snapshot_times")) s.snapshot_times = numbers(doc, "", "snapshot_times");
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json doc;
  doc["name"] = s.name;
  doc["geometry"] = geometry_name(s.geometry);
  doc["dimension"] = s.dimension;
  doc["lambda"] = s.lambda;
  doc["v_sup"] = s.v_sup;
  doc["domain"] = {s.domain_lo, s.domain_hi};
  doc["marker_count"] = s.marker_count;
  doc["t_end"] = s.t_end;
  Json d;
  switch (s.density.kind) {
    case DensityKind::Uniform: d = {{"kind", "uniform"}, {"value", s.density.value}}; break;
    case DensityKind::Gaussian:
      d = {{"kind", "gaussian"}, {"value", s.density.value}, {"width", s.density.width}, {"center", s.density.center}};
      break;
    case DensityKind::Table: d = {{"kind", "table"}, {"x", s.density.nodes}, {"rho", s.density.samples}}; break;
  }
  doc["density"] = d;
  Json v;
  switch (s.velocity.kind) {
    case VelocityKind::Zero: v = {{"kind", "zero"}}; break;
    case VelocityKind::Hubble: v = {{"kind", "hubble"}, {"rate", s.velocity.rate}, {"shift", s.velocity.shift}}; break;
    case VelocityKind::Table: v = {{"kind", "table"}, {"x", s.velocity.nodes}, {"u", s.velocity.samples}}; break;
  }
  doc["velocity"] = v;
  const auto& ns = s.numerics;
  doc["numerics"] = {{"rel_tol", ns.rel_tol},
                     {"abs_tol", ns.abs_tol},
                     {"div_blowup_threshold", ns.div_blowup_threshold},
                     {"rho_blowup_threshold", ns.rho_blowup_threshold},
                     {"crossing_gap_threshold", ns.crossing_gap_threshold},
                     {"max_steps", ns.max_steps},
                     {"max_step", ns.max_step},
                     {"output_interval", ns.output_interval}};
  doc["snapshot_times"] = s.snapshot_times;
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("scenario", "cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad("scenario", std::string("JSON parse error: ") + e.what());
  }
  return scenario_from_json(doc);
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_diagnostics_csv(std::ostream& os, const Trajectory& t) {
  os << "time,h_value,h_rate,total_mass,support_volume,support_within_bound,cs_divergence_margin,"
        "cs_density_margin,riccati_residual,characteristic_residual,min_density,max_density,max_abs_div\n";
  for (const auto& d : t.diagnostics) {
    os << format_double(d.time) << ',' << format_double(d.h_value) << ',' << format_double(d.h_rate) << ','
       << format_double(d.total_mass) << ',' << format_double(d.support_volume) << ','
       << (d.support_within_bound ? 1 : 0) << ',' << format_double(d.cs_divergence_margin) << ','
       << format_double(d.cs_density_margin) << ',' << format_double(d.riccati_residual) << ','
       << format_double(d.characteristic_residual) << ',' << format_double(d.min_density) << ','
       << format_double(d.max_density) << ',' << format_double(d.max_abs_div) << '\n';
  }
}

void write_markers_csv(std::ostream& os, const Trajectory& t) {
  const char* pos = t.geometry == Geometry::Slab1D ? "x" : "r";
  os << "time,marker," << pos << ",velocity,density,eig_radial,eig_tangential,mass_weight\n";
  std::vector<std::size_t> rows{0};
  rows.insert(rows.end(), t.snapshot_steps.begin(), t.snapshot_steps.end());
  if (!t.steps.empty()) rows.push_back(t.steps.size() - 1);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  for (std::size_t k : rows) {
    if (k >= t.steps.size()) continue;
    const auto& s = t.steps[k];
    for (std::size_t j = 0; j < s.markers.size(); ++j) {
      const auto& m = s.markers[j];
      os << format_double(s.time) << ',' << j << ',' << format_double(m.position) << ','
         << format_double(m.velocity) << ',' << format_double(m.density) << ',' << format_double(m.eig_radial)
         << ',' << format_double(m.eig_tangential) << ',' << format_double(m.mass_weight) << '\n';
    }
  }
}

Json to_json(const DiagnosticsRecord& d) {
  Json j;
  j["time"] = d.time;
  j["h_value"] = finite_or_null(d.h_value);
  j["h_rate"] = finite_or_null(d.h_rate);
  j["total_mass"] = d.total_mass;
  j["support_volume"] = d.support_volume;
  j["support_within_bound"] = d.support_within_bound;
  j["cs_divergence_margin"] = finite_or_null(d.cs_divergence_margin);
  j["cs_density_margin"] = finite_or_null(d.cs_density_margin);
  j["riccati_residual"] = finite_or_null(d.riccati_residual);
  j["characteristic_residual"] = finite_or_null(d.characteristic_residual);
  j["min_density"] = finite_or_null(d.min_density);
  j["max_density"] = finite_or_null(d.max_density);
  j["max_abs_div"] = finite_or_null(d.max_abs_div);
  return j;
}

Json to_json(const BlowupEvent& e) {
  Json j;
  j["t_lo"] = e.t_lo;
  j["t_hi"] = e.t_hi;
  j["trigger"] = to_string(e.trigger);
  j["marker_index"] = e.marker_index;
  j["values_at_t_lo"] = to_json(e.values_at_t_lo);
  return j;
}

Json to_json(const BlowupCertificate& c) {
  Json j;
  j["case"] = to_string(c.certificate_case);
  j["t_bound"] = optional_number(c.t_bound);
  j["threshold_case2"] = optional_number(c.threshold_case2);
  j["formula"] = c.formula.empty() ? Json(nullptr) : Json(c.formula);
  j["boundary_extension"] = c.boundary_extension;
  j["inputs"] = {{"mass", c.inputs.mass},
                 {"v_sup", c.inputs.v_sup},
                 {"lambda", c.inputs.lambda},
                 {"dimension", c.inputs.dimension},
                 {"h0", c.inputs.h0}};
  return j;
}

Json to_json(const detector::EscapeReport& r) {
  Json j;
  j["kind"] = detector::to_string(r.kind);
  j["message"] = r.message;
  j["escape_time"] = optional_number(r.escape_time);
  return j;
}

Json to_json(const functional::ProofChainReport& r) {
  Json j;
  Json summary;
  summary["steps"] = r.steps.size();
  summary["worst_cs_divergence_margin"] = finite_or_null(r.worst_cs_divergence);
  summary["worst_cs_density_margin"] = optional_number(r.worst_cs_density);
  summary["worst_riccati_residual"] = finite_or_null(r.worst_riccati);
  summary["worst_transport_residual"] = r.worst_transport;
  summary["first_violation_time"] = optional_number(r.first_violation_time);
  summary["hypothesis_violations"] = r.hypothesis_violations;
  summary["near_singular_from"] = optional_number(r.near_singular_from);
  j["summary"] = summary;
  Json records = Json::array();
  for (const auto& p : r.steps) {
    records.push_back({{"time", p.time},
                       {"transport_residual", optional_number(p.transport_residual)},
                       {"riccati_fd_residual", optional_number(p.riccati_fd_residual)},
                       {"cs_divergence_margin", finite_or_null(p.cs_divergence_margin)},
                       {"cs_density_margin", optional_number(p.cs_density_margin)},
                       {"riccati_residual", finite_or_null(p.riccati_residual)},
                       {"tolerance", p.tolerance},
                       {"hypothesis_violated", p.hypothesis_violated},
                       {"near_singular", p.near_singular},
                       {"violation", p.violation}});
  }
  j["records"] = std::move(records);
  return j;
}

std::string proof_chain_summary(const functional::ProofChainReport& r, const Trajectory& t) {
  std::ostringstream os;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("n/a"); };
  os << "proof-chain verification summary\n";
  os << "geometry: " << geometry_name(t.geometry) << "  N = " << t.dimension << "  lambda = "
     << format_double(t.lambda) << "  v_sup = " << format_double(t.v_sup) << '\n';
  os << "accepted steps: " << t.steps.size() << "  rejected: " << t.rejected_steps << "  final time: "
     << format_double(t.final_time()) << '\n';
  if (t.event) {
    os << "event: " << to_string(t.event->trigger) << " at marker " << t.event->marker_index << " in ["
       << format_double(t.event->t_lo) << ", " << format_double(t.event->t_hi) << "]\n";
    os << "near-singular window (informational only) from t = " << opt(r.near_singular_from) << '\n';
  } else {
    os << "event: none\n";
  }
  os << "worst divergence Cauchy-Schwarz margin: " << format_double(r.worst_cs_divergence) << '\n';
  os << "worst density Cauchy-Schwarz margin:    " << opt(r.worst_cs_density) << '\n';
  os << "worst Riccati residual (<= 0 holds):    " << format_double(r.worst_riccati) << '\n';
  os << "worst transport residual:               " << format_double(r.worst_transport) << '\n';
  os << "steps with support above v_sup:         " << r.hypothesis_violations;
  if (r.hypothesis_violations > 0) os << "  (HypothesisViolated: density and Riccati checks not asserted there)";
  os << '\n';
  os << "first violation: " << opt(r.first_violation_time) << '\n';
  os << "verdict: " << (r.first_violation_time ? "VIOLATED" : "all inequalities hold within tolerance") << '\n';
  return os.str();
}

} // namespace dustlab::io
