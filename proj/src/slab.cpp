#include "dustlab/slab.hpp"

#include <algorithm>

#include "dustlab/simulation.hpp"

namespace dustlab::slab {

double center_of_mass(std::span<const LagrangianMarker> markers) {
  double mass = 0.0, moment = 0.0;
  for (const auto& m : markers) {
    mass += m.mass_weight;
    moment += m.mass_weight * m.position;
  }
  return mass > 0.0 ? moment / mass : 0.0;
}

SlabFieldState make_state(std::vector<LagrangianMarker> markers, double time, double lambda) {
  SlabFieldState s;
  s.center_of_mass = center_of_mass(markers);
  s.markers = std::move(markers);
  s.time = time;
  s.lambda = lambda;
  return s;
}

double slab_force(const SlabFieldState& state, std::size_t at_marker) {
  const auto& ms = state.markers;
  if (ms.empty()) throw Error(ErrorCode::EmptyState, "slab state has no markers");
  if (at_marker >= ms.size()) throw Error(ErrorCode::BadInput, "marker index out of range");
  double left = 0.0, right = 0.0;
  for (std::size_t k = 0; k < ms.size(); ++k) {
    if (k < at_marker) left += ms[k].mass_weight;
    else if (k > at_marker) right += ms[k].mass_weight;
  }
  const double own = 0.5 * ms[at_marker].mass_weight;
  left += own;
  right += own;
  return 0.5 * (right - left) + state.lambda * (ms[at_marker].position - state.center_of_mass);
}

std::vector<MarkerRates> slab_rhs(const SlabFieldState& state) {
  const auto& ms = state.markers;
  if (ms.empty()) throw Error(ErrorCode::EmptyState, "slab state has no markers");
  for (std::size_t j = 1; j < ms.size(); ++j) {
    if (!(ms[j].position > ms[j - 1].position))
      throw Error(ErrorCode::CrossedMarkers, "markers " + std::to_string(j - 1) + " and " + std::to_string(j));
  }
  std::vector<MarkerRates> out(ms.size());
  for (std::size_t j = 0; j < ms.size(); ++j) {
    const auto& m = ms[j];
    auto& r = out[j];
    r.position = m.velocity;
    r.velocity = slab_force(state, j);
    r.density = -m.density * m.eig_radial;
    r.eig_radial = -m.eig_radial * m.eig_radial - m.density + state.lambda;
  }
  return out;
}

void pack(std::span<const LagrangianMarker> markers, std::span<double> y) {
  for (std::size_t j = 0; j < markers.size(); ++j) {
    y[kFields * j + 0] = markers[j].position;
    y[kFields * j + 1] = markers[j].velocity;
    y[kFields * j + 2] = markers[j].density;
    y[kFields * j + 3] = markers[j].eig_radial;
  }
}

void unpack(std::span<const double> y, std::span<const double> masses, std::span<LagrangianMarker> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].position = y[kFields * j + 0];
    out[j].velocity = y[kFields * j + 1];
    out[j].density = y[kFields * j + 2];
    out[j].eig_radial = y[kFields * j + 3];
    out[j].eig_tangential = 0.0;
    out[j].mass_weight = masses[j];
  }
}

void rhs_flat(std::span<const double> masses, double lambda, std::span<const double> y, std::span<double> dydt) {
  const std::size_t n = masses.size();
  double total = 0.0, moment = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    total += masses[j];
    moment += masses[j] * y[kFields * j];
  }
  const double x_cm = total > 0.0 ? moment / total : 0.0;
  double left = 0.0; // mass strictly left of marker j
  for (std::size_t j = 0; j < n; ++j) {
    const double x = y[kFields * j + 0];
    const double u = y[kFields * j + 1];
    const double rho = y[kFields * j + 2];
    const double w = y[kFields * j + 3];
    const double m_left = left + 0.5 * masses[j];
    const double m_right = total - m_left;
    dydt[kFields * j + 0] = u;
    dydt[kFields * j + 1] = 0.5 * (m_right - m_left) + lambda * (x - x_cm);
    dydt[kFields * j + 2] = -rho * w;
    dydt[kFields * j + 3] = -w * w - rho + lambda;
    left += masses[j];
  }
}

Trajectory integrate_slab(const ValidatedScenario& scenario) {
  if (scenario.scenario().geometry != Geometry::Slab1D)
    throw Error(ErrorCode::BadInput, "integrate_slab needs a slab scenario");
  return simulate(scenario);
}

} // namespace dustlab::slab
