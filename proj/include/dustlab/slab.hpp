#pragma once

#include <span>
#include <vector>

#include "dustlab/core.hpp"
#include "dustlab/trajectory.hpp"

/// One-dimensional slab dust. Along each characteristic the system is
/// closed and exact:
///
///   x' = u,  u' = -Phi_x,  rho' = -rho w,  w' = -w^2 - rho + Lambda,
///
/// with w = u_x. In 1-D the velocity gradient is a scalar, so the
/// zero-vorticity hypothesis holds automatically.
///
/// Gauge: Phi_x(x) = (M_left - M_right)/2 - Lambda (x - x_cm). The Lambda
/// term is anchored at the centre of mass, so the frame does not accelerate.
namespace dustlab::slab {

inline constexpr std::size_t kFields = 4; // x, u, rho, w

struct SlabFieldState {
  std::vector<LagrangianMarker> markers; // positions strictly increasing
  double time = 0.0;
  double center_of_mass = 0.0;
  double lambda = 0.0;
};

double center_of_mass(std::span<const LagrangianMarker> markers);

/// Builds a state with the centre of mass computed from the markers.
SlabFieldState make_state(std::vector<LagrangianMarker> markers, double time, double lambda);

/// -Phi_x at marker j. The marker's own mass counts half on each side.
double slab_force(const SlabFieldState& state, std::size_t at_marker);

std::vector<MarkerRates> slab_rhs(const SlabFieldState& state);

// Flat layout used by the integrator: kFields doubles per marker.
void pack(std::span<const LagrangianMarker> markers, std::span<double> y);
void unpack(std::span<const double> y, std::span<const double> masses, std::span<LagrangianMarker> out);
void rhs_flat(std::span<const double> masses, double lambda, std::span<const double> y, std::span<double> dydt);

Trajectory integrate_slab(const ValidatedScenario& scenario);

} // namespace dustlab::slab
