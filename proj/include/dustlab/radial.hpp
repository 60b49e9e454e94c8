#pragma once

#include <span>
#include <vector>

#include "dustlab/core.hpp"
#include "dustlab/trajectory.hpp"

/// Radially symmetric dust in N >= 2 dimensions. The velocity gradient of
/// u(r) x/r has eigenvalues l1 = du/dr (once) and l2 = u/r (N-1 times),
/// and both evolve exactly along a shell:
///
///   l1' = -l1^2 - Phi_rr,   l2' = -l2^2 - Phi_r / r,
///   Phi_r = m_enc(r) / (sigma_{N-1} r^{N-1}) - Lambda r / N,
///   Phi_rr = (rho - Lambda) - (N-1) Phi_r / r.
namespace dustlab::radial {

inline constexpr std::size_t kFields = 5; // r, u, rho, l1, l2

struct ShellState {
  std::vector<LagrangianMarker> shells; // radii strictly increasing, >= 0
  double time = 0.0;
  int dimension = 3;
  double lambda = 0.0;
};

/// Mass of shells strictly inside r plus half of any shell sitting at r.
double enclosed_mass(const ShellState& state, double r);

/// Phi_r at radius r > 0.
double potential_gradient(const ShellState& state, double r);

/// -Phi_r at shell j. Throws ZeroRadius for r_j <= 0: a shell at the
/// centre feels no force by symmetry and is handled inside radial_rhs.
double radial_force(const ShellState& state, std::size_t at_shell);

std::vector<MarkerRates> radial_rhs(const ShellState& state);

/// |Phi_rr + (N-1) Phi_r / r - (rho_j - Lambda)| with Phi_rr taken by
/// finite differences of the quadratured Phi_r across neighbouring shells.
double hessian_trace_residual(const ShellState& state, std::size_t at_shell);

/// max_j |l2_j - u_j / r_j| over shells with r_j > 0.
double tangential_mismatch(std::span<const LagrangianMarker> shells);

void pack(std::span<const LagrangianMarker> shells, std::span<double> y);
void unpack(std::span<const double> y, std::span<const double> masses, std::span<LagrangianMarker> out);
void rhs_flat(std::span<const double> masses, int dimension, double lambda, std::span<const double> y,
              std::span<double> dydt);

Trajectory integrate_radial(const ValidatedScenario& scenario);

} // namespace dustlab::radial
