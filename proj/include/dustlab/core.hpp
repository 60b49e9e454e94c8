#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dustlab {

enum class Geometry { Slab1D, RadialND };

/// Failure categories raised by the solvers, the certificate engine and the
/// proof-chain checks. Scenario validation has its own richer error type.
enum class ErrorCode {
  EmptyState,
  CrossedMarkers,
  CrossedShells,
  ZeroRadius,
  StepUnderflow,
  MaxStepsExceeded,
  BracketStall,
  PreconditionViolated,
  HypothesisViolated,
  NoCertificate,
  BeyondBlowup,
  NoPoleInHorizon,
  BadInput,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct NumericalSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double div_blowup_threshold = 1e8;
  double rho_blowup_threshold = 1e12;
  double crossing_gap_threshold = 1e-12;
  std::int64_t max_steps = 200000;
  // Optional step shaping; 0 disables.
  double max_step = 0.0;
  double output_interval = 0.0;
};

enum class DensityKind { Uniform, Gaussian, Table };

/// Initial density rho_0. Gaussian profiles are truncated to the scenario
/// domain; tabulated profiles are interpolated linearly between nodes.
struct DensityProfile {
  DensityKind kind = DensityKind::Uniform;
  double value = 0.0;  // uniform value, or peak value for Gaussian
  double width = 1.0;  // Gaussian standard deviation
  double center = 0.0; // Gaussian centre (slab only)
  std::vector<double> nodes;
  std::vector<double> samples;

  double operator()(double x) const;
};

enum class VelocityKind { Zero, Hubble, Table };

/// Initial velocity. Hubble flow is u = rate * x + shift (slab) or
/// u = rate * r (radial, shift must be zero).
struct VelocityProfile {
  VelocityKind kind = VelocityKind::Zero;
  double rate = 0.0;
  double shift = 0.0;
  std::vector<double> nodes;
  std::vector<double> samples;

  double operator()(double x) const;
  double gradient(double x) const;
};

struct Scenario {
  std::string name;
  Geometry geometry = Geometry::Slab1D;
  int dimension = 1;
  double lambda = 0.0;
  double v_sup = 1.0;
  // Slab: [lo, hi] on the line. Radial: radii lo <= r <= hi, lo >= 0.
  double domain_lo = -1.0;
  double domain_hi = 1.0;
  DensityProfile density;
  VelocityProfile velocity;
  int marker_count = 64;
  double t_end = 1.0;
  NumericalSettings numerics;
  std::vector<double> snapshot_times;
};

enum class ViolationKind {
  NegativeDensity,
  VolumeExceedsBound,
  BadDimension,
  BadMarkerCount,
  BadDomain,
  BadTable,
  BadSettings,
  BadTime,
  ZeroMass,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string field;
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class ValidatedScenario {
 public:
  const Scenario& scenario() const noexcept { return scenario_; }
  double initial_support_volume() const noexcept { return initial_volume_; }

 private:
  friend ValidatedScenario validate_scenario(const Scenario& raw);
  ValidatedScenario(Scenario s, double volume) : scenario_(std::move(s)), initial_volume_(volume) {}

  Scenario scenario_;
  double initial_volume_;
};

/// Checks every scenario invariant and returns the normalized scenario
/// (slab dimension forced to 1, snapshot times sorted). Throws
/// ValidationError listing all violations at once.
ValidatedScenario validate_scenario(const Scenario& raw);
inline ValidatedScenario validate_scenario(const ValidatedScenario& v) { return v; }

struct VorticityCheck {
  bool satisfied = false;
  std::string explanation;
};

/// The initial-vorticity hypothesis Omega_0 = 0. In one dimension the
/// gradient is a scalar, and a radial field u(r) x / r has a symmetric
/// gradient, so both supported geometries satisfy it by construction.
VorticityCheck initial_vorticity_satisfied(const ValidatedScenario& scenario);

/// One Lagrangian characteristic.
struct LagrangianMarker {
  double position = 0.0;
  double velocity = 0.0;
  double density = 0.0;
  double eig_radial = 0.0;     // u_x in 1-D, du/dr in radial geometry
  double eig_tangential = 0.0; // u/r (radial only)
  double mass_weight = 0.0;
};

/// Time derivatives of the evolving marker fields.
struct MarkerRates {
  double position = 0.0;
  double velocity = 0.0;
  double density = 0.0;
  double eig_radial = 0.0;
  double eig_tangential = 0.0;
};

/// Marker set at one instant, together with the rates evaluated there.
/// `rates` may be empty when only the state is known.
struct Snapshot {
  Geometry geometry = Geometry::Slab1D;
  int dimension = 1;
  double time = 0.0;
  std::vector<LagrangianMarker> markers;
  std::vector<MarkerRates> rates;
};

struct DiagnosticsRecord {
  double time = 0.0;
  double h_value = 0.0;
  double h_rate = 0.0; // dH/dt from the transported integrand
  double total_mass = 0.0;
  double support_volume = 0.0;
  bool support_within_bound = true;
  double cs_divergence_margin = 0.0;
  double cs_density_margin = 0.0;
  double riccati_residual = 0.0;
  double characteristic_residual = 0.0;
  double min_density = 0.0;
  double max_density = 0.0;
  double max_abs_div = 0.0;
};

enum class CertificateCase { CaseOne, CaseTwo, Boundary, NoCertificate };

const char* to_string(CertificateCase c);

struct CertificateInputs {
  double mass = 0.0;
  double v_sup = 0.0;
  double lambda = 0.0;
  int dimension = 1;
  double h0 = 0.0;
};

struct BlowupCertificate {
  CertificateCase certificate_case = CertificateCase::NoCertificate;
  std::optional<double> t_bound;
  CertificateInputs inputs;
  // sqrt(-M^3 N / V_sup + Lambda M^2 N); empty when the radicand is negative.
  std::optional<double> threshold_case2;
  std::string formula;
  bool boundary_extension = false;
};

double unit_sphere_area(int dimension);
double ball_volume(int dimension, double radius);

/// div u at a marker: eig_radial in 1-D, eig_radial + (N-1) eig_tangential
/// in radial geometry.
double divergence(const LagrangianMarker& m, Geometry geometry, int dimension);
double divergence_rate(const MarkerRates& r, Geometry geometry, int dimension);

/// Initial markers: equal-width cells over the domain, one marker per cell,
/// mass weight from midpoint quadrature of rho_0 over the cell. Radial
/// markers sit at the volume midpoint of their shell.
std::vector<LagrangianMarker> initial_markers(const ValidatedScenario& scenario);

Snapshot initial_snapshot(const ValidatedScenario& scenario);

} // namespace dustlab
