#include "dustlab/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dustlab::functional {

double weighted_divergence_functional(const Snapshot& s) {
  double h = 0.0;
  for (const auto& m : s.markers) h += m.mass_weight * divergence(m, s.geometry, s.dimension);
  return h;
}

double weighted_divergence_rate(const Snapshot& s) {
  if (s.rates.size() != s.markers.size()) throw Error(ErrorCode::BadInput, "snapshot carries no rates");
  double rate = 0.0;
  for (std::size_t j = 0; j < s.markers.size(); ++j)
    rate += s.markers[j].mass_weight * divergence_rate(s.rates[j], s.geometry, s.dimension);
  return rate;
}

double total_mass(const Snapshot& s) {
  double m = 0.0;
  for (const auto& mk : s.markers) m += mk.mass_weight;
  return m;
}

double support_volume(const Snapshot& s) {
  if (s.markers.empty()) return 0.0;
  // Each marker sits at the volume midpoint of its cell, so the outer
  // half-cells (m / rho / 2) extend the span out to the cell edges.
  auto half_cell = [](const LagrangianMarker& m) { return m.density > 0.0 ? 0.5 * m.mass_weight / m.density : 0.0; };
  if (s.geometry == Geometry::Slab1D) {
    const auto [lo, hi] = std::minmax_element(s.markers.begin(), s.markers.end(),
                                              [](const auto& a, const auto& b) { return a.position < b.position; });
    return hi->position - lo->position + half_cell(*lo) + half_cell(*hi);
  }
  const auto [lo, hi] = std::minmax_element(s.markers.begin(), s.markers.end(),
                                            [](const auto& a, const auto& b) { return a.position < b.position; });
  const double outer = ball_volume(s.dimension, hi->position) + half_cell(*hi);
  const double inner = std::max(0.0, ball_volume(s.dimension, lo->position) - half_cell(*lo));
  return outer - inner;
}

bool within_support_bound(double volume, double v_sup) { return volume <= v_sup * (1.0 + 1e-12); }

double density_square_integral(const Snapshot& s) {
  double acc = 0.0;
  for (const auto& m : s.markers) acc += m.mass_weight * m.density;
  return acc;
}

double geometric_density_square(const Snapshot& s) {
  const auto& ms = s.markers;
  const std::size_t n = ms.size();
  if (n < 2) throw Error(ErrorCode::BadInput, "need at least two markers");
  std::vector<double> bounds(n + 1);
  for (std::size_t j = 1; j < n; ++j) bounds[j] = 0.5 * (ms[j - 1].position + ms[j].position);
  bounds[0] = ms[0].position - 0.5 * (ms[1].position - ms[0].position);
  bounds[n] = ms[n - 1].position + 0.5 * (ms[n - 1].position - ms[n - 2].position);
  double acc = 0.0;
  if (s.geometry == Geometry::Slab1D) {
    for (std::size_t j = 0; j < n; ++j) acc += ms[j].density * ms[j].density * (bounds[j + 1] - bounds[j]);
    return acc;
  }
  bounds[0] = std::max(0.0, bounds[0]);
  const double sigma = unit_sphere_area(s.dimension);
  for (std::size_t j = 0; j < n; ++j) {
    const double vol =
        sigma * (std::pow(bounds[j + 1], s.dimension) - std::pow(bounds[j], s.dimension)) / s.dimension;
    acc += ms[j].density * ms[j].density * vol;
  }
  return acc;
}

double cauchy_schwarz_check_divergence(const Snapshot& s) {
  double mass = 0.0, first = 0.0, second = 0.0;
  for (const auto& m : s.markers) {
    const double d = divergence(m, s.geometry, s.dimension);
    mass += m.mass_weight;
    first += m.mass_weight * d;
    second += m.mass_weight * d * d;
  }
  return mass * second - first * first;
}

double cauchy_schwarz_check_density(const Snapshot& s, double v_sup) {
  const double volume = support_volume(s);
  if (!within_support_bound(volume, v_sup)) {
    throw Error(ErrorCode::HypothesisViolated,
                "support volume " + std::to_string(volume) + " exceeds v_sup " + std::to_string(v_sup));
  }
  const double mass = total_mass(s);
  return v_sup * density_square_integral(s) - mass * mass;
}

namespace {

void check_step(const Trajectory& t, std::size_t step) {
  if (step + 1 >= t.steps.size()) throw Error(ErrorCode::BadInput, "step has no successor");
}

} // namespace

double transport_theorem_residual(const Trajectory& t, std::size_t step) {
  check_step(t, step);
  const auto& a = t.steps[step];
  const auto& b = t.steps[step + 1];
  const double dt = b.time - a.time;
  const double quotient = (weighted_divergence_functional(b) - weighted_divergence_functional(a)) / dt;
  const double transported = 0.5 * (weighted_divergence_rate(a) + weighted_divergence_rate(b));
  return std::abs(quotient - transported);
}

double riccati_pointwise_residual(double h, double h_rate, double mass, int dimension, double v_sup,
                                  double lambda) {
  return h_rate + h * h / (mass * dimension) + mass * mass / v_sup - lambda * mass;
}

double riccati_inequality_residual(const Trajectory& t, std::size_t step) {
  check_step(t, step);
  const auto& a = t.steps[step];
  const auto& b = t.steps[step + 1];
  if (!within_support_bound(support_volume(a), t.v_sup) || !within_support_bound(support_volume(b), t.v_sup))
    throw Error(ErrorCode::HypothesisViolated, "support exceeds v_sup on this step");
  const double ha = weighted_divergence_functional(a);
  const double hb = weighted_divergence_functional(b);
  const double dt = b.time - a.time;
  const double mass = total_mass(a);
  return riccati_pointwise_residual(0.5 * (ha + hb), (hb - ha) / dt, mass, a.dimension, t.v_sup, t.lambda);
}

double margin_tolerance(double h, double mass) { return 1e-6 * std::max({1.0, h * h, mass * mass}); }

DiagnosticsRecord diagnostics(const Snapshot& s, double lambda, double v_sup) {
  DiagnosticsRecord d;
  d.time = s.time;
  d.h_value = weighted_divergence_functional(s);
  d.total_mass = total_mass(s);
  d.support_volume = support_volume(s);
  d.support_within_bound = within_support_bound(d.support_volume, v_sup);
  d.cs_divergence_margin = cauchy_schwarz_check_divergence(s);
  d.cs_density_margin = v_sup * density_square_integral(s) - d.total_mass * d.total_mass;

  d.min_density = std::numeric_limits<double>::infinity();
  d.max_density = -std::numeric_limits<double>::infinity();
  for (const auto& m : s.markers) {
    d.min_density = std::min(d.min_density, m.density);
    d.max_density = std::max(d.max_density, m.density);
    d.max_abs_div = std::max(d.max_abs_div, std::abs(divergence(m, s.geometry, s.dimension)));
  }

  if (s.rates.size() == s.markers.size() && !s.markers.empty()) {
    d.h_rate = weighted_divergence_rate(s);
    d.riccati_residual = riccati_pointwise_residual(d.h_value, d.h_rate, d.total_mass, s.dimension, v_sup, lambda);
    // Slab: |w' + w^2 + rho - Lambda| (an identity). Radial: the signed
    // spectral inequality D(div)/Dt + div^2/N + rho - Lambda <= 0.
    double worst = s.geometry == Geometry::Slab1D ? 0.0 : -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.markers.size(); ++j) {
      const auto& m = s.markers[j];
      const double div = divergence(m, s.geometry, s.dimension);
      const double rate = divergence_rate(s.rates[j], s.geometry, s.dimension);
      const double scale = std::max({1.0, div * div, std::abs(m.density), std::abs(lambda)});
      const double value = (rate + div * div / s.dimension + m.density - lambda) / scale;
      worst = s.geometry == Geometry::Slab1D ? std::max(worst, std::abs(value)) : std::max(worst, value);
    }
    d.characteristic_residual = worst;
  } else {
    d.h_rate = std::numeric_limits<double>::quiet_NaN();
    d.riccati_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

ProofChainReport proof_chain_report(const Trajectory& t) {
  ProofChainReport r;
  if (t.event) r.near_singular_from = 0.99 * t.event->t_lo;
  r.worst_cs_divergence = std::numeric_limits<double>::infinity();
  r.worst_riccati = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& s = t.steps[k];
    const auto& d = t.diagnostics[k];
    ProofChainStep p;
    p.time = s.time;
    p.near_singular = r.near_singular_from && s.time >= *r.near_singular_from;
    p.tolerance = margin_tolerance(d.h_value, d.total_mass);
    p.cs_divergence_margin = d.cs_divergence_margin;
    p.riccati_residual = d.riccati_residual;
    p.hypothesis_violated = !d.support_within_bound;
    if (!p.hypothesis_violated) p.cs_density_margin = d.cs_density_margin;
    if (k > 0) {
      p.transport_residual = transport_theorem_residual(t, k - 1);
      if (!p.hypothesis_violated && t.diagnostics[k - 1].support_within_bound)
        p.riccati_fd_residual = riccati_inequality_residual(t, k - 1);
    }
    if (p.hypothesis_violated) ++r.hypothesis_violations;

    if (!p.near_singular) {
      bool bad = p.cs_divergence_margin < -p.tolerance;
      if (p.cs_density_margin) bad = bad || *p.cs_density_margin < -p.tolerance;
      // The Riccati step needs the bounded-volume hypothesis.
      if (!p.hypothesis_violated) bad = bad || p.riccati_residual > p.tolerance;
      p.violation = bad;
      if (bad && !r.first_violation_time) r.first_violation_time = p.time;

      r.worst_cs_divergence = std::min(r.worst_cs_divergence, p.cs_divergence_margin);
      if (p.cs_density_margin)
        r.worst_cs_density = std::min(r.worst_cs_density.value_or(*p.cs_density_margin), *p.cs_density_margin);
      if (!p.hypothesis_violated) r.worst_riccati = std::max(r.worst_riccati, p.riccati_residual);
      if (p.transport_residual) r.worst_transport = std::max(r.worst_transport, *p.transport_residual);
    }
    r.steps.push_back(p);
  }
  return r;
}

} // namespace dustlab::functional
