#pragma once

#include <optional>
#include <vector>

#include "dustlab/core.hpp"

/// Finite-time blowup certificates from the Riccati inequality
///
///   H' <= -a H^2 - b,   a = 1/(M N),   b = M^2/V_sup - Lambda M,
///
/// and closed-form solutions of the comparison equation y' = -a y^2 - b.
namespace dustlab::riccati {

enum class Regime { Positive, Zero, Negative }; // sign of b

struct RiccatiParams {
  double a = 1.0;
  double b = 0.0;
  double h0 = 0.0;

  Regime regime() const noexcept;
};

/// b is computed as M (M/V_sup - Lambda) so that Lambda == M/V_sup gives
/// b == 0 exactly.
RiccatiParams make_params(double mass, double v_sup, double lambda, int dimension, double h0);

/// sqrt(M^2 N (Lambda - M/V_sup)), or empty when Lambda < M/V_sup.
std::optional<double> case_two_threshold(double mass, double v_sup, double lambda, int dimension);

/// Which blowup condition applies. Strict inequalities throughout; the
/// Boundary case Lambda == M/V_sup with h0 < 0 is an extension flagged on
/// the certificate.
BlowupCertificate check_blowup_conditions(double mass, double v_sup, double lambda, int dimension, double h0);

/// Time at which the comparison solution reaches -infinity:
///   b > 0:            (pi/2 + atan(h0 sqrt(a/b))) / sqrt(a b)
///   b = 0, h0 < 0:    -1 / (a h0)
///   b < 0, h0 < -c:   arcoth(-h0 / c) / sqrt(a |b|),  c = sqrt(|b|/a)
/// Throws NoCertificate when the comparison solution is global.
double blowup_time_upper_bound(const RiccatiParams& params);

/// Whether the comparison solution blows up at all.
bool has_finite_blowup(const RiccatiParams& params);

/// Closed-form y(t). For b < 0 and h0 >= -c the solution is global and
/// tends to the stable equilibrium +c (tanh branch for |h0| < c, coth
/// branch for h0 > c, constant at h0 = +-c). Throws BeyondBlowup for
/// t >= T on a blowing-up branch.
double comparison_solution(const RiccatiParams& params, double t);

struct PoleBracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct ComparisonPath {
  std::vector<double> times;
  std::vector<double> values;
  std::optional<PoleBracket> pole;

  /// Throws NoPoleInHorizon when no pole was found.
  const PoleBracket& pole_bracket() const;
};

inline constexpr double kPoleThreshold = 1e8;
inline constexpr double kPoleBracketWidth = 1e-8;

/// Brute-force oracle: adaptive Dormand-Prince integration of the
/// comparison equation up to `until`. Once y < -kPoleThreshold the pole is
/// located by bisection on the root of z = 1/y, which obeys the regular
/// equation z' = a + b z^2 through the pole.
ComparisonPath integrate_comparison_ode(const RiccatiParams& params, double until, double dt_init = 1e-3,
                                        double rel_tol = 1e-12, double abs_tol = 1e-14);

/// Pointwise bound -N / div u_0 for a marker with rho_0 > 0 and
/// div u_0 < 0 (zero background constant); empty otherwise.
std::optional<double> chae_tadmor_pointwise_bound(const LagrangianMarker& marker0, int dimension);

} // namespace dustlab::riccati
