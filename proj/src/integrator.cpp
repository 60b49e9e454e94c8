#include "dustlab/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace dustlab {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace

DormandPrince45::DormandPrince45(OdeRhs rhs, std::size_t size)
    : rhs_(std::move(rhs)), size_(size), k2_(size), k3_(size), k4_(size), k5_(size), k6_(size), tmp_(size) {}

DormandPrince45::Trial DormandPrince45::attempt(double t, std::span<const double> y, std::span<const double> k1,
                                                double h, double rel_tol, double abs_tol) {
  const std::size_t n = size_;
  Trial out;
  out.y.resize(n);
  out.dydt.resize(n);

  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1[i];
  rhs_(t + c2 * h, tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1[i] + a32 * k2_[i]);
  rhs_(t + c3 * h, tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a41 * k1[i] + a42 * k2_[i] + a43 * k3_[i]);
  rhs_(t + c4 * h, tmp_, k4_);
  for (std::size_t i = 0; i < n; ++i)
    tmp_[i] = y[i] + h * (a51 * k1[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
  rhs_(t + c5 * h, tmp_, k5_);
  for (std::size_t i = 0; i < n; ++i)
    tmp_[i] = y[i] + h * (a61 * k1[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
  rhs_(t + h, tmp_, k6_);
  for (std::size_t i = 0; i < n; ++i)
    out.y[i] = y[i] + h * (a71 * k1[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
  rhs_(t + h, out.y, out.dydt);

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double err =
        h * (e1 * k1[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * out.dydt[i]);
    const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out.y[i]));
    const double q = err / scale;
    acc += q * q;
    if (!std::isfinite(out.y[i]) || !std::isfinite(out.dydt[i])) out.finite = false;
  }
  out.error_norm = n > 0 ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
  if (!std::isfinite(out.error_norm)) out.finite = false;
  return out;
}

double DormandPrince45::next_step(double h, double error_norm) {
  constexpr double safety = 0.9, min_factor = 0.2, max_factor = 5.0;
  if (!(error_norm > 0.0)) return h * max_factor;
  const double factor = safety * std::pow(error_norm, -0.2);
  return h * std::clamp(factor, min_factor, max_factor);
}

double DormandPrince45::initial_step(double t, std::span<const double> y, std::span<const double> dydt,
                                     double rel_tol, double abs_tol, double h_max) const {
  const std::size_t n = size_;
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = abs_tol + rel_tol * std::abs(y[i]);
    d0 += (y[i] / sc) * (y[i] / sc);
    d1 += (dydt[i] / sc) * (dydt[i] / sc);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, h_max);

  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + h0 * dydt[i];
  rhs_(t + h0, y1, f1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = abs_tol + rel_tol * std::abs(y[i]);
    d2 += ((f1[i] - dydt[i]) / sc) * ((f1[i] - dydt[i]) / sc);
  }
  d2 = std::sqrt(d2 / n) / h0;
  double h1 = 0.0;
  if (!std::isfinite(d2)) {
    h1 = h0 * 1e-3;
  } else if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
  }
  return std::min({100.0 * h0, h1, h_max});
}

} // namespace dustlab
