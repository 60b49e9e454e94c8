#pragma once

#include <cmath>
#include <random>

#include "dustlab/core.hpp"

namespace dustlab::testing {

inline Scenario uniform_slab(double rho0, double half_width, double v_sup, double lambda = 0.0, double rate = 0.0,
                             int markers = 64, double t_end = 5.0) {
  Scenario s;
  s.name = "uniform-slab";
  s.geometry = Geometry::Slab1D;
  s.dimension = 1;
  s.lambda = lambda;
  s.v_sup = v_sup;
  s.domain_lo = -half_width;
  s.domain_hi = half_width;
  s.density.kind = DensityKind::Uniform;
  s.density.value = rho0;
  if (rate != 0.0) {
    s.velocity.kind = VelocityKind::Hubble;
    s.velocity.rate = rate;
  }
  s.marker_count = markers;
  s.t_end = t_end;
  return s;
}

inline Scenario uniform_ball(int dimension, double rho0, double radius, double v_sup, double lambda = 0.0,
                             double rate = 0.0, int markers = 64, double t_end = 6.0) {
  Scenario s = uniform_slab(rho0, radius, v_sup, lambda, rate, markers, t_end);
  s.name = "uniform-ball";
  s.geometry = Geometry::RadialND;
  s.dimension = dimension;
  s.domain_lo = 0.0;
  return s;
}

/// Closed-form homogeneous 1-D collapse. The Jacobian obeys
/// J'' = Lambda J - rho0 with J(0) = 1, J'(0) = w0; rho = rho0 / J and w = J' / J.
struct SlabHomogeneous {
  double rho0, w0, lambda;
  double jacobian(double t) const {
    if (lambda == 0.0) return 1.0 + w0 * t - 0.5 * rho0 * t * t;
    const double k = std::sqrt(lambda);
    return rho0 / lambda + (1.0 - rho0 / lambda) * std::cosh(k * t) + w0 / k * std::sinh(k * t);
  }
  double jacobian_rate(double t) const {
    if (lambda == 0.0) return w0 - rho0 * t;
    const double k = std::sqrt(lambda);
    return (1.0 - rho0 / lambda) * k * std::sinh(k * t) + w0 * std::cosh(k * t);
  }
  double density(double t) const { return rho0 / jacobian(t); }
  double gradient(double t) const { return jacobian_rate(t) / jacobian(t); }
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

} // namespace dustlab::testing
