#include "dustlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dustlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyState: return "EmptyState";
    case ErrorCode::CrossedMarkers: return "CrossedMarkers";
    case ErrorCode::CrossedShells: return "CrossedShells";
    case ErrorCode::ZeroRadius: return "ZeroRadius";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::BracketStall: return "BracketStall";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NoCertificate: return "NoCertificate";
    case ErrorCode::BeyondBlowup: return "BeyondBlowup";
    case ErrorCode::NoPoleInHorizon: return "NoPoleInHorizon";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NegativeDensity: return "NegativeDensity";
    case ViolationKind::VolumeExceedsBound: return "VolumeExceedsBound";
    case ViolationKind::BadDimension: return "BadDimension";
    case ViolationKind::BadMarkerCount: return "BadMarkerCount";
    case ViolationKind::BadDomain: return "BadDomain";
    case ViolationKind::BadTable: return "BadTable";
    case ViolationKind::BadSettings: return "BadSettings";
    case ViolationKind::BadTime: return "BadTime";
    case ViolationKind::ZeroMass: return "ZeroMass";
  }
  return "Unknown";
}

const char* to_string(CertificateCase c) {
  switch (c) {
    case CertificateCase::CaseOne: return "CaseOne";
    case CertificateCase::CaseTwo: return "CaseTwo";
    case CertificateCase::Boundary: return "Boundary";
    case CertificateCase::NoCertificate: return "NoCertificate";
  }
  return "Unknown";
}

namespace {

std::string join_violations(const std::vector<Violation>& vs) {
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& v : vs) os << "\n  " << to_string(v.kind) << " [" << v.field << "] " << v.message;
  return os.str();
}

// Linear interpolation on a sorted table, clamped at the ends.
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.empty()) return 0.0;
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

// Nodal slopes by finite differences, interpolated linearly so the
// velocity gradient is continuous.
double table_gradient(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  std::vector<double> slope(n);
  slope[0] = (ys[1] - ys[0]) / (xs[1] - xs[0]);
  slope[n - 1] = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = (ys[i + 1] - ys[i - 1]) / (xs[i + 1] - xs[i - 1]);
  return interpolate(xs, slope, x);
}

bool strictly_increasing(const std::vector<double>& xs) {
  return std::adjacent_find(xs.begin(), xs.end(), std::greater_equal<>()) == xs.end();
}

double domain_volume(const Scenario& s) {
  if (s.geometry == Geometry::Slab1D) return s.domain_hi - s.domain_lo;
  const double n = s.dimension;
  return unit_sphere_area(s.dimension) * (std::pow(s.domain_hi, n) - std::pow(s.domain_lo, n)) / n;
}

} // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

double DensityProfile::operator()(double x) const {
  switch (kind) {
    case DensityKind::Uniform: return value;
    case DensityKind::Gaussian: {
      const double z = (x - center) / width;
      return value * std::exp(-0.5 * z * z);
    }
    case DensityKind::Table: return interpolate(nodes, samples, x);
  }
  return 0.0;
}

double VelocityProfile::operator()(double x) const {
  switch (kind) {
    case VelocityKind::Zero: return 0.0;
    case VelocityKind::Hubble: return rate * x + shift;
    case VelocityKind::Table: return interpolate(nodes, samples, x);
  }
  return 0.0;
}

double VelocityProfile::gradient(double x) const {
  switch (kind) {
    case VelocityKind::Zero: return 0.0;
    case VelocityKind::Hubble: return rate;
    case VelocityKind::Table: return table_gradient(nodes, samples, x);
  }
  return 0.0;
}

double unit_sphere_area(int dimension) {
  const double n = dimension;
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

double ball_volume(int dimension, double radius) {
  return unit_sphere_area(dimension) * std::pow(radius, dimension) / dimension;
}

double divergence(const LagrangianMarker& m, Geometry geometry, int dimension) {
  if (geometry == Geometry::Slab1D) return m.eig_radial;
  return m.eig_radial + (dimension - 1) * m.eig_tangential;
}

double divergence_rate(const MarkerRates& r, Geometry geometry, int dimension) {
  if (geometry == Geometry::Slab1D) return r.eig_radial;
  return r.eig_radial + (dimension - 1) * r.eig_tangential;
}

ValidatedScenario validate_scenario(const Scenario& raw) {
  Scenario s = raw;
  std::vector<Violation> out;
  auto fail = [&](ViolationKind k, std::string field, std::string msg) {
    out.push_back({k, std::move(field), std::move(msg)});
  };

  if (s.geometry == Geometry::Slab1D) {
    s.dimension = 1;
  } else if (s.dimension < 2) {
    fail(ViolationKind::BadDimension, "dimension", "radial geometry needs dimension >= 2");
  }
  if (s.marker_count < 2) fail(ViolationKind::BadMarkerCount, "marker_count", "need at least 2 markers");
  if (!(s.t_end > 0.0)) fail(ViolationKind::BadTime, "t_end", "t_end must be positive");
  if (!(s.v_sup > 0.0)) fail(ViolationKind::VolumeExceedsBound, "v_sup", "v_sup must be positive");
  if (!std::isfinite(s.lambda)) fail(ViolationKind::BadSettings, "lambda", "lambda must be finite");
  if (!(s.domain_hi > s.domain_lo)) fail(ViolationKind::BadDomain, "domain", "domain must have hi > lo");
  if (s.geometry == Geometry::RadialND && s.domain_lo < 0.0)
    fail(ViolationKind::BadDomain, "domain", "radial domain must start at r >= 0");
  if (s.geometry == Geometry::RadialND && s.velocity.kind == VelocityKind::Hubble && s.velocity.shift != 0.0)
    fail(ViolationKind::BadSettings, "velocity.shift", "a uniform shift breaks radial symmetry");

  const auto& ns = s.numerics;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) fail(ViolationKind::BadSettings, std::string("numerics.") + name, "must be strictly positive");
  };
  positive(ns.rel_tol, "rel_tol");
  positive(ns.abs_tol, "abs_tol");
  positive(ns.div_blowup_threshold, "div_blowup_threshold");
  positive(ns.rho_blowup_threshold, "rho_blowup_threshold");
  positive(ns.crossing_gap_threshold, "crossing_gap_threshold");
  if (ns.max_steps <= 0) fail(ViolationKind::BadSettings, "numerics.max_steps", "must be strictly positive");
  if (ns.max_step < 0.0) fail(ViolationKind::BadSettings, "numerics.max_step", "must be >= 0 (0 disables)");
  if (ns.output_interval < 0.0)
    fail(ViolationKind::BadSettings, "numerics.output_interval", "must be >= 0 (0 disables)");

  const auto& d = s.density;
  switch (d.kind) {
    case DensityKind::Uniform:
      if (d.value < 0.0) fail(ViolationKind::NegativeDensity, "density.value", "uniform density is negative");
      break;
    case DensityKind::Gaussian:
      if (d.value < 0.0) fail(ViolationKind::NegativeDensity, "density.value", "peak density is negative");
      if (!(d.width > 0.0)) fail(ViolationKind::BadSettings, "density.width", "width must be positive");
      if (s.geometry == Geometry::RadialND && d.center != 0.0)
        fail(ViolationKind::BadSettings, "density.center", "radial Gaussian must be centred at the origin");
      break;
    case DensityKind::Table:
      if (d.nodes.size() < 2 || d.nodes.size() != d.samples.size() || !strictly_increasing(d.nodes)) {
        fail(ViolationKind::BadTable, "density.table", "need >= 2 strictly increasing nodes matching samples");
      }
      for (std::size_t i = 0; i < d.samples.size(); ++i) {
        if (d.samples[i] < 0.0) {
          fail(ViolationKind::NegativeDensity, "density.samples[" + std::to_string(i) + "]",
               "sample " + std::to_string(d.samples[i]) + " is negative");
        }
      }
      break;
  }
  const auto& v = s.velocity;
  if (v.kind == VelocityKind::Table &&
      (v.nodes.size() < 2 || v.nodes.size() != v.samples.size() || !strictly_increasing(v.nodes))) {
    fail(ViolationKind::BadTable, "velocity.table", "need >= 2 strictly increasing nodes matching samples");
  }

  for (double t : s.snapshot_times) {
    if (!(t >= 0.0) || t > s.t_end) fail(ViolationKind::BadTime, "snapshot_times", "snapshot outside [0, t_end]");
  }
  std::sort(s.snapshot_times.begin(), s.snapshot_times.end());
  s.snapshot_times.erase(std::unique(s.snapshot_times.begin(), s.snapshot_times.end()), s.snapshot_times.end());

  double volume = 0.0;
  if (out.empty()) {
    volume = domain_volume(s);
    if (volume > s.v_sup) {
      std::ostringstream os;
      os << "initial support volume " << volume << " exceeds v_sup " << s.v_sup;
      fail(ViolationKind::VolumeExceedsBound, "v_sup", os.str());
    }
  }
  if (out.empty()) {
    ValidatedScenario candidate(s, volume);
    double mass = 0.0;
    for (const auto& m : initial_markers(candidate)) mass += m.mass_weight;
    if (!(mass > 0.0)) fail(ViolationKind::ZeroMass, "density", "total mass must be positive");
  }
  if (!out.empty()) throw ValidationError(std::move(out));
  return ValidatedScenario(std::move(s), volume);
}

VorticityCheck initial_vorticity_satisfied(const ValidatedScenario& scenario) {
  if (scenario.scenario().geometry == Geometry::Slab1D) return {true, "1-D: condition automatic"};
  return {true, "radial gradient is symmetric"};
}

std::vector<LagrangianMarker> initial_markers(const ValidatedScenario& scenario) {
  const Scenario& s = scenario.scenario();
  const auto n = static_cast<std::size_t>(s.marker_count);
  const double lo = s.domain_lo;
  const double width = (s.domain_hi - s.domain_lo) / static_cast<double>(n);
  std::vector<LagrangianMarker> markers(n);

  if (s.geometry == Geometry::Slab1D) {
    for (std::size_t j = 0; j < n; ++j) {
      auto& m = markers[j];
      m.position = lo + (static_cast<double>(j) + 0.5) * width;
      m.velocity = s.velocity(m.position);
      m.density = s.density(m.position);
      m.eig_radial = s.velocity.gradient(m.position);
      m.mass_weight = m.density * width;
    }
    return markers;
  }

  const int dim = s.dimension;
  const double sigma = unit_sphere_area(dim);
  for (std::size_t j = 0; j < n; ++j) {
    auto& m = markers[j];
    const double r_in = lo + static_cast<double>(j) * width;
    const double r_out = lo + static_cast<double>(j + 1) * width;
    const double p_in = std::pow(r_in, dim);
    const double p_out = std::pow(r_out, dim);
    m.position = std::pow(0.5 * (p_in + p_out), 1.0 / dim);
    m.velocity = s.velocity(m.position);
    m.density = s.density(m.position);
    m.eig_radial = s.velocity.gradient(m.position);
    m.eig_tangential = m.position > 0.0 ? m.velocity / m.position : m.eig_radial;
    m.mass_weight = m.density * sigma * (p_out - p_in) / dim;
  }
  return markers;
}

Snapshot initial_snapshot(const ValidatedScenario& scenario) {
  Snapshot snap;
  snap.geometry = scenario.scenario().geometry;
  snap.dimension = scenario.scenario().dimension;
  snap.time = 0.0;
  snap.markers = initial_markers(scenario);
  return snap;
}

} // namespace dustlab
