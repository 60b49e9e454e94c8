#include "dustlab/radial.hpp"

#include <cmath>
#include <limits>

#include "dustlab/simulation.hpp"

namespace dustlab::radial {

namespace {

void check_state(const ShellState& state) {
  if (state.shells.empty()) throw Error(ErrorCode::EmptyState, "shell state has no shells");
  if (state.dimension < 2) throw Error(ErrorCode::BadInput, "radial geometry needs dimension >= 2");
}

} // namespace

double enclosed_mass(const ShellState& state, double r) {
  double m = 0.0;
  for (const auto& s : state.shells) {
    if (s.position < r) m += s.mass_weight;
    else if (s.position == r) m += 0.5 * s.mass_weight;
  }
  return m;
}

double potential_gradient(const ShellState& state, double r) {
  const int n = state.dimension;
  return enclosed_mass(state, r) / (unit_sphere_area(n) * std::pow(r, n - 1)) - state.lambda * r / n;
}

double radial_force(const ShellState& state, std::size_t at_shell) {
  check_state(state);
  if (at_shell >= state.shells.size()) throw Error(ErrorCode::BadInput, "shell index out of range");
  const double r = state.shells[at_shell].position;
  if (!(r > 0.0)) throw Error(ErrorCode::ZeroRadius, "shell " + std::to_string(at_shell) + " at r <= 0");
  return -potential_gradient(state, r);
}

std::vector<MarkerRates> radial_rhs(const ShellState& state) {
  check_state(state);
  const auto& sh = state.shells;
  for (std::size_t j = 0; j < sh.size(); ++j) {
    if (sh[j].position < 0.0) throw Error(ErrorCode::ZeroRadius, "shell " + std::to_string(j) + " at r < 0");
    if (j > 0 && !(sh[j].position > sh[j - 1].position))
      throw Error(ErrorCode::CrossedShells, "shells " + std::to_string(j - 1) + " and " + std::to_string(j));
  }
  std::vector<double> masses(sh.size()), y(kFields * sh.size()), dy(kFields * sh.size());
  for (std::size_t j = 0; j < sh.size(); ++j) masses[j] = sh[j].mass_weight;
  pack(sh, y);
  rhs_flat(masses, state.dimension, state.lambda, y, dy);
  std::vector<MarkerRates> out(sh.size());
  for (std::size_t j = 0; j < sh.size(); ++j) {
    out[j] = {dy[kFields * j], dy[kFields * j + 1], dy[kFields * j + 2], dy[kFields * j + 3],
              dy[kFields * j + 4]};
  }
  return out;
}

double hessian_trace_residual(const ShellState& state, std::size_t at_shell) {
  check_state(state);
  const auto& sh = state.shells;
  if (sh.size() < 2) throw Error(ErrorCode::BadInput, "need two shells for a difference quotient");
  const std::size_t lo = at_shell == 0 ? 0 : at_shell - 1;
  const std::size_t hi = at_shell + 1 < sh.size() ? at_shell + 1 : at_shell;
  const double r = sh[at_shell].position;
  if (!(r > 0.0) || !(sh[lo].position > 0.0)) throw Error(ErrorCode::ZeroRadius, "difference stencil touches r = 0");
  const double phi_rr = (potential_gradient(state, sh[hi].position) - potential_gradient(state, sh[lo].position)) /
                        (sh[hi].position - sh[lo].position);
  const double trace = phi_rr + (state.dimension - 1) * potential_gradient(state, r) / r;
  return std::abs(trace - (sh[at_shell].density - state.lambda));
}

double tangential_mismatch(std::span<const LagrangianMarker> shells) {
  double worst = 0.0;
  for (const auto& s : shells) {
    if (s.position > 0.0) worst = std::max(worst, std::abs(s.eig_tangential - s.velocity / s.position));
  }
  return worst;
}

void pack(std::span<const LagrangianMarker> shells, std::span<double> y) {
  for (std::size_t j = 0; j < shells.size(); ++j) {
    y[kFields * j + 0] = shells[j].position;
    y[kFields * j + 1] = shells[j].velocity;
    y[kFields * j + 2] = shells[j].density;
    y[kFields * j + 3] = shells[j].eig_radial;
    y[kFields * j + 4] = shells[j].eig_tangential;
  }
}

void unpack(std::span<const double> y, std::span<const double> masses, std::span<LagrangianMarker> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].position = y[kFields * j + 0];
    out[j].velocity = y[kFields * j + 1];
    out[j].density = y[kFields * j + 2];
    out[j].eig_radial = y[kFields * j + 3];
    out[j].eig_tangential = y[kFields * j + 4];
    out[j].mass_weight = masses[j];
  }
}

void rhs_flat(std::span<const double> masses, int dimension, double lambda, std::span<const double> y,
              std::span<double> dydt) {
  const double n = dimension;
  const double sigma = unit_sphere_area(dimension);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double inside = 0.0;
  for (std::size_t j = 0; j < masses.size(); ++j) {
    const double r = y[kFields * j + 0];
    const double u = y[kFields * j + 1];
    const double rho = y[kFields * j + 2];
    const double l1 = y[kFields * j + 3];
    double l2 = y[kFields * j + 4];
    double* d = &dydt[kFields * j];
    const double m_enc = inside + 0.5 * masses[j];
    inside += masses[j];

    if (!(r >= 0.0)) {
      // Trial stage pushed a shell through the centre; make the stepper reject it.
      for (std::size_t f = 0; f < kFields; ++f) d[f] = nan;
      continue;
    }
    double phi_r = 0.0, phi_r_over_r = 0.0;
    if (r > 0.0) {
      phi_r = m_enc / (sigma * std::pow(r, dimension - 1)) - lambda * r / n;
      phi_r_over_r = phi_r / r;
    } else {
      // Smooth limit at the centre: isotropic Hessian, l2 continued by l1.
      phi_r_over_r = (rho - lambda) / n;
      l2 = l1;
    }
    const double phi_rr = (rho - lambda) - (n - 1.0) * phi_r_over_r;
    d[0] = u;
    d[1] = -phi_r;
    d[2] = -rho * (l1 + (n - 1.0) * l2);
    d[3] = -l1 * l1 - phi_rr;
    d[4] = r > 0.0 ? -l2 * l2 - phi_r_over_r : d[3];
  }
}

Trajectory integrate_radial(const ValidatedScenario& scenario) {
  if (scenario.scenario().geometry != Geometry::RadialND)
    throw Error(ErrorCode::BadInput, "integrate_radial needs a radial scenario");
  return simulate(scenario);
}

} // namespace dustlab::radial
