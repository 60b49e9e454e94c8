#include "dustlab/riccati.hpp"

#include <cmath>
#include <numbers>

#include "dustlab/integrator.hpp"

namespace dustlab::riccati {

namespace {

double arcoth(double z) { return 0.5 * std::log1p(2.0 / (z - 1.0)); }

} // namespace

Regime RiccatiParams::regime() const noexcept {
  if (b > 0.0) return Regime::Positive;
  if (b < 0.0) return Regime::Negative;
  return Regime::Zero;
}

RiccatiParams make_params(double mass, double v_sup, double lambda, int dimension, double h0) {
  if (!(mass > 0.0) || !(v_sup > 0.0) || dimension < 1)
    throw Error(ErrorCode::BadInput, "need M > 0, v_sup > 0 and N >= 1");
  RiccatiParams p;
  p.a = 1.0 / (mass * dimension);
  p.b = mass * (mass / v_sup - lambda);
  p.h0 = h0;
  return p;
}

std::optional<double> case_two_threshold(double mass, double v_sup, double lambda, int dimension) {
  const double excess = lambda - mass / v_sup;
  if (excess < 0.0) return std::nullopt;
  return std::sqrt(mass * mass * dimension * excess);
}

bool has_finite_blowup(const RiccatiParams& p) {
  switch (p.regime()) {
    case Regime::Positive: return true;
    case Regime::Zero: return p.h0 < 0.0;
    case Regime::Negative: return p.h0 < -std::sqrt(-p.b / p.a);
  }
  return false;
}

double blowup_time_upper_bound(const RiccatiParams& p) {
  if (!has_finite_blowup(p)) throw Error(ErrorCode::NoCertificate, "comparison solution is global");
  switch (p.regime()) {
    case Regime::Positive: {
      // pi/2 + atan(x) == atan2(1, -x) without cancellation for x << 0.
      const double x = p.h0 * std::sqrt(p.a / p.b);
      return std::atan2(1.0, -x) / std::sqrt(p.a * p.b);
    }
    case Regime::Zero: return -1.0 / (p.a * p.h0);
    case Regime::Negative: {
      const double c = std::sqrt(-p.b / p.a);
      return arcoth(-p.h0 / c) / std::sqrt(-p.a * p.b);
    }
  }
  return 0.0;
}

BlowupCertificate check_blowup_conditions(double mass, double v_sup, double lambda, int dimension, double h0) {
  BlowupCertificate cert;
  cert.inputs = {mass, v_sup, lambda, dimension, h0};
  cert.threshold_case2 = case_two_threshold(mass, v_sup, lambda, dimension);
  const double ratio = mass / v_sup;
  if (lambda < ratio) {
    cert.certificate_case = CertificateCase::CaseOne;
    cert.formula = "tan: T = (pi/2 + atan(h0 sqrt(a/b))) / sqrt(ab)";
  } else if (lambda == ratio) {
    if (h0 < 0.0) {
      cert.certificate_case = CertificateCase::Boundary;
      cert.formula = "rational: T = -M N / h0";
      cert.boundary_extension = true;
    }
  } else if (h0 < -*cert.threshold_case2) {
    cert.certificate_case = CertificateCase::CaseTwo;
    cert.formula = "arcoth: T = arcoth(-h0 / c) / sqrt(a|b|), c = sqrt(|b|/a)";
  }
  if (cert.certificate_case != CertificateCase::NoCertificate)
    cert.t_bound = blowup_time_upper_bound(make_params(mass, v_sup, lambda, dimension, h0));
  return cert;
}

double comparison_solution(const RiccatiParams& p, double t) {
  if (has_finite_blowup(p) && t >= blowup_time_upper_bound(p))
    throw Error(ErrorCode::BeyondBlowup, "t is at or past the comparison blowup time");
  switch (p.regime()) {
    case Regime::Positive: {
      const double c = std::sqrt(p.b / p.a);
      const double k = std::sqrt(p.a * p.b);
      return c * std::tan(std::atan(p.h0 / c) - k * t);
    }
    case Regime::Zero: return p.h0 / (1.0 + p.a * p.h0 * t);
    case Regime::Negative: {
      const double c = std::sqrt(-p.b / p.a);
      const double k = std::sqrt(-p.a * p.b);
      const double q = p.h0 / c;
      if (q == 1.0 || q == -1.0) return p.h0;
      if (std::abs(q) < 1.0) return c * std::tanh(std::atanh(q) + k * t);
      // coth branch; psi0 < 0 blows up at psi = 0, psi0 > 0 relaxes to +c.
      const double psi0 = q > 0.0 ? arcoth(q) : -arcoth(-q);
      return c / std::tanh(psi0 + k * t);
    }
  }
  return 0.0;
}

const PoleBracket& ComparisonPath::pole_bracket() const {
  if (!pole) throw Error(ErrorCode::NoPoleInHorizon, "comparison solution stayed finite over the horizon");
  return *pole;
}

namespace {

// Locates the zero of z = 1/y starting from (t0, z0 < 0).
PoleBracket locate_pole(const RiccatiParams& p, double t0, double z0, double rel_tol) {
  DormandPrince45 st(
      [a = p.a, b = p.b](double, std::span<const double> z, std::span<double> dz) { dz[0] = a + b * z[0] * z[0]; },
      1);
  const double abs_tol = 1e-6 * rel_tol * std::abs(z0);
  double t = t0;
  std::vector<double> z{z0}, k(1);
  st.evaluate(t, z, k);
  double h = std::min(-z0 / k[0], 1.0) * 0.1;

  for (int guard = 0; guard < 1000000; ++guard) {
    auto trial = st.attempt(t, z, k, h, rel_tol, abs_tol);
    if (!trial.finite || trial.error_norm > 1.0) {
      h = trial.finite ? DormandPrince45::next_step(h, trial.error_norm) : 0.25 * h;
      continue;
    }
    if (trial.y[0] >= 0.0) {
      // Root inside [t, t + h]: bisect on single sub-steps from t.
      double lo = 0.0, hi = h;
      while ((t + hi) - (t + lo) > kPoleBracketWidth) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const auto sub = st.attempt(t, z, k, mid, rel_tol, abs_tol);
        if (sub.y[0] >= 0.0) hi = mid;
        else lo = mid;
      }
      return {t + lo, t + hi};
    }
    t += h;
    h = DormandPrince45::next_step(h, trial.error_norm);
    z = std::move(trial.y);
    k = std::move(trial.dydt);
  }
  throw Error(ErrorCode::BracketStall, "reciprocal integration did not reach the pole");
}

} // namespace

ComparisonPath integrate_comparison_ode(const RiccatiParams& p, double until, double dt_init, double rel_tol,
                                        double abs_tol) {
  DormandPrince45 st(
      [a = p.a, b = p.b](double, std::span<const double> y, std::span<double> dy) { dy[0] = -a * y[0] * y[0] - b; },
      1);
  ComparisonPath path;
  double t = 0.0;
  std::vector<double> y{p.h0}, k(1);
  st.evaluate(t, y, k);
  path.times.push_back(t);
  path.values.push_back(y[0]);
  double h = dt_init > 0.0 ? dt_init : 1e-3;

  while (t < until) {
    const double h_try = std::min(h, until - t);
    auto trial = st.attempt(t, y, k, h_try, rel_tol, abs_tol);
    if (!trial.finite || trial.error_norm > 1.0) {
      h = trial.finite ? DormandPrince45::next_step(h_try, trial.error_norm) : 0.25 * h_try;
      if (h < 1e-15 * std::max(1.0, t)) throw Error(ErrorCode::StepUnderflow, "comparison oracle step collapsed");
      continue;
    }
    if (trial.y[0] < -kPoleThreshold) {
      if (y[0] > -1.0) {
        // Too coarse to hand over to the reciprocal variable yet.
        h = 0.25 * h_try;
        continue;
      }
      path.pole = locate_pole(p, t, 1.0 / y[0], rel_tol);
      return path;
    }
    t = h_try == until - t ? until : t + h_try;
    y = std::move(trial.y);
    k = std::move(trial.dydt);
    path.times.push_back(t);
    path.values.push_back(y[0]);
    h = DormandPrince45::next_step(h_try, trial.error_norm);
  }
  return path;
}

std::optional<double> chae_tadmor_pointwise_bound(const LagrangianMarker& marker0, int dimension) {
  const Geometry g = dimension == 1 ? Geometry::Slab1D : Geometry::RadialND;
  const double div = divergence(marker0, g, dimension);
  if (marker0.density > 0.0 && div < 0.0) return -dimension / div;
  return std::nullopt;
}

} // namespace dustlab::riccati
