#pragma once

#include <optional>
#include <vector>

#include "dustlab/core.hpp"
#include "dustlab/trajectory.hpp"

/// The mass-weighted divergence functional H(t) = int div u d mu_t and the
/// inequality chain that turns its evolution into a Riccati inequality
///
///   dH/dt <= -H^2 / (M N) - M^2 / V_sup + Lambda M.
///
/// Every integral against d mu_t = rho dx is a sum over markers weighted by
/// their fixed masses, so these quadratures are exact in the Lagrangian
/// measure. Margins are (large side - small side): nonnegative means the
/// inequality holds.
namespace dustlab::functional {

double weighted_divergence_functional(const Snapshot& snapshot);

/// sum_j m_j D(div u)_j / Dt. Requires snapshot.rates.
double weighted_divergence_rate(const Snapshot& snapshot);

double total_mass(const Snapshot& snapshot);

/// Span of the marker cells: extreme markers plus their outer half-cells.
double support_volume(const Snapshot& snapshot);

/// volume <= v_sup up to a relative 1e-12 of quadrature roundoff.
bool within_support_bound(double volume, double v_sup);

/// int rho^2 dx quadratured as sum_j m_j rho_j.
double density_square_integral(const Snapshot& snapshot);

/// int rho^2 dx on cells bounded by the midpoints between markers, using
/// positions and densities only (independent of the mass weights).
double geometric_density_square(const Snapshot& snapshot);

/// M sum m_j (div u_j)^2 - (sum m_j div u_j)^2.
double cauchy_schwarz_check_divergence(const Snapshot& snapshot);

/// v_sup sum m_j rho_j - M^2. Throws HypothesisViolated when the support
/// volume exceeds v_sup.
double cauchy_schwarz_check_density(const Snapshot& snapshot, double v_sup);

/// |dH/dt - sum m_j D(div u)_j/Dt| over accepted step [step, step+1]: the
/// difference quotient of H against the trapezoidal midpoint estimate of
/// the transported integrand. Second order in the step length.
double transport_theorem_residual(const Trajectory& trajectory, std::size_t step);

/// dH/dt + H^2/(MN) + M^2/v_sup - Lambda M over step [step, step+1], with
/// dH/dt a difference quotient and H at the midpoint averaged. Throws
/// HypothesisViolated if either end has support above v_sup.
double riccati_inequality_residual(const Trajectory& trajectory, std::size_t step);

double riccati_pointwise_residual(double h, double h_rate, double mass, int dimension, double v_sup,
                                  double lambda);

/// 1e-6 * max(1, H^2, M^2).
double margin_tolerance(double h, double mass);

DiagnosticsRecord diagnostics(const Snapshot& snapshot, double lambda, double v_sup);

struct ProofChainStep {
  double time = 0.0;
  std::optional<double> transport_residual;   // interval ending here
  std::optional<double> riccati_fd_residual;  // interval ending here
  double cs_divergence_margin = 0.0;
  std::optional<double> cs_density_margin;    // empty when support > v_sup
  double riccati_residual = 0.0;
  double tolerance = 0.0;
  bool hypothesis_violated = false;
  bool near_singular = false;
  bool violation = false;
};

struct ProofChainReport {
  std::vector<ProofChainStep> steps;
  double worst_cs_divergence = 0.0;
  std::optional<double> worst_cs_density;
  double worst_riccati = 0.0;
  double worst_transport = 0.0;
  std::optional<double> first_violation_time;
  std::size_t hypothesis_violations = 0;
  std::optional<double> near_singular_from;
};

/// Steps within the last 1% of the horizon before an event are marked
/// near-singular and never count as violations.
ProofChainReport proof_chain_report(const Trajectory& trajectory);

} // namespace dustlab::functional
