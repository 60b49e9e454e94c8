// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "../support.hpp"
#include "dustlab/cli.hpp"
#include "dustlab/detector.hpp"
#include "dustlab/functional.hpp"
#include "dustlab/riccati.hpp"
#include "dustlab/simulation.hpp"

using namespace dustlab;
using dustlab::testing::uniform_ball;
using dustlab::testing::uniform_slab;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Every run made by the suite, so criteria 3 and 5 can sweep all of them.
std::vector<Trajectory> g_runs;

const Trajectory& run(const Scenario& s) {
  g_runs.push_back(simulate(validate_scenario(s)));
  return g_runs.back();
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  if constexpr (sizeof...(Args) == 0) return f;
  else std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Verdict closed_form_vs_oracle() {
  std::mt19937_64 rng(1);
  using riccati::RiccatiParams;
  double worst = 0.0;
  int failures = 0, draws = 0;

  auto compare = [&](const RiccatiParams& p) {
    const double t = riccati::blowup_time_upper_bound(p);
    const auto path = riccati::integrate_comparison_ode(p, 2.0 * t + 1.0);
    if (!path.pole) {
      ++failures;
      return;
    }
    const double mid = 0.5 * (path.pole->lo + path.pole->hi);
    const double err = std::abs(mid - t) / std::max(1.0, t);
    worst = std::max(worst, err);
    if (err > 1e-6) ++failures;
    ++draws;
  };

  for (int regime = 0; regime < 3; ++regime) {
    for (int i = 0; i < 1000; ++i) {
      const double m = testing::log_uniform(rng, 0.1, 10.0), v = testing::log_uniform(rng, 0.5, 10.0);
      const int n = 1 + static_cast<int>(rng() % 3);
      double lambda = 0.0, h0 = 0.0;
      if (regime == 0) {
        lambda = m / v * testing::uniform(rng, -1.0, 0.99);
        h0 = testing::uniform(rng, -5.0, 5.0);
      } else if (regime == 1) {
        lambda = m / v;
        h0 = -testing::log_uniform(rng, 0.05, 10.0);
      } else {
        lambda = m / v * testing::uniform(rng, 1.01, 4.0);
        h0 = -*riccati::case_two_threshold(m, v, lambda, n) * testing::uniform(rng, 1.05, 4.0);
      }
      const auto p = riccati::make_params(m, v, lambda, n, h0);
      const bool regime_ok = (regime == 0 && p.regime() == riccati::Regime::Positive) ||
                             (regime == 1 && p.regime() == riccati::Regime::Zero) ||
                             (regime == 2 && p.regime() == riccati::Regime::Negative);
      if (!regime_ok) {
        ++failures;
        continue;
      }
      compare(p);
    }
  }

  const double spot1 = riccati::blowup_time_upper_bound(riccati::make_params(1, 1, 0, 1, 0));
  const double spot2 = riccati::blowup_time_upper_bound(riccati::make_params(1, 1, 2, 1, -2));
  compare(riccati::make_params(1, 1, 0, 1, 0));
  compare(riccati::make_params(1, 1, 2, 1, -2));
  const bool spots = std::abs(spot1 - std::numbers::pi / 2) <= 1e-12 && std::abs(spot2 - 0.5 * std::log(3.0)) <= 1e-12;
  return {failures == 0 && spots && draws == 3002,
          fmt("%d draws, max |dT|/max(1,T) = %.3g, spot T = %.16g and %.16g", draws, worst, spot1, spot2)};
}

// ---------------------------------------------------------------------------

struct SoundnessStats {
  int slab = 0, radial2 = 0, radial3 = 0, escaped = 0, violations = 0;
  std::vector<double> slack;
};

Scenario random_collapse(std::mt19937_64& rng, Geometry g, int n) {
  const double radius = testing::uniform(rng, 0.5, 1.5);
  Scenario s = g == Geometry::Slab1D ? uniform_slab(1.0, radius, 1.0) : uniform_ball(n, 1.0, radius, 1.0);
  s.marker_count = 48;
  s.density.value = testing::uniform(rng, 0.2, 2.0);
  if (rng() % 2 == 0) {
    s.density.kind = DensityKind::Gaussian;
    s.density.width = testing::uniform(rng, 0.4, 1.2) * radius;
  }
  s.velocity.kind = VelocityKind::Hubble;
  s.velocity.rate = testing::uniform(rng, -0.6, 0.05);
  const double volume = g == Geometry::Slab1D ? 2.0 * radius : ball_volume(n, radius);
  s.v_sup = volume * testing::uniform(rng, 1.0, 1.5);
  // Lambda anywhere from zero up to just past M / V_sup; the certificate
  // decides which case (if any) applies.
  const double mass = functional::total_mass(initial_snapshot(validate_scenario(s)));
  s.lambda = mass / s.v_sup * testing::uniform(rng, 0.0, 1.3);
  return s;
}

Verdict certificate_soundness(SoundnessStats& st) {
  std::mt19937_64 rng(2);
  struct Slot {
    Geometry g;
    int n;
    int* count;
    int quota;
  };
  const Slot slots[] = {{Geometry::Slab1D, 1, &st.slab, 24}, {Geometry::RadialND, 2, &st.radial2, 12},
                        {Geometry::RadialND, 3, &st.radial3, 12}};
  for (const auto& slot : slots) {
    for (int attempt = 0; attempt < 400 && *slot.count < slot.quota; ++attempt) {
      Scenario s = random_collapse(rng, slot.g, slot.n);
      const auto vs = validate_scenario(s);
      const auto cert = cli::certify_scenario(vs);
      if (!cert.t_bound) continue;
      s.t_end = *cert.t_bound + 0.5;
      const auto& traj = run(s);
      const auto rep = detector::escape_report(traj, s.v_sup, cert);
      if (rep.kind == detector::EscapeKind::SupportEscaped) {
        ++st.escaped;
        continue;
      }
      ++*slot.count;
      if (rep.kind != detector::EscapeKind::CertificateHonored) {
        ++st.violations;
        std::printf("  soundness violation: %s\n", rep.message.c_str());
        continue;
      }
      st.slack.push_back(*cert.t_bound - traj.event->t_hi);
    }
  }
  std::sort(st.slack.begin(), st.slack.end());
  auto q = [&](double f) { return st.slack.empty() ? 0.0 : st.slack[static_cast<std::size_t>(f * (st.slack.size() - 1))]; };
  const bool pass = st.violations == 0 && st.slab >= 20 && st.radial2 + st.radial3 >= 20;
  return {pass,
          fmt("%d slab, %d N=2, %d N=3 certified runs with bounded support (%d escaped, skipped); "
              "slack T_bound - t_hi min %.4g, median %.4g, max %.4g",
              st.slab, st.radial2, st.radial3, st.escaped, q(0.0), q(0.5), q(1.0))};
}

// ---------------------------------------------------------------------------

Verdict proof_chain() {
  double worst_cs_div = 0.0, worst_cs_rho = 0.0, worst_ric = -1e300;
  std::size_t checked = 0, bad = 0;
  for (const auto& t : g_runs) {
    const double window = t.event ? 0.99 * t.event->t_lo : 1e300;
    for (const auto& d : t.diagnostics) {
      if (d.time >= window) continue;
      ++checked;
      worst_cs_div = std::min(worst_cs_div, d.cs_divergence_margin);
      bool ok = d.cs_divergence_margin >= -1e-6;
      if (d.support_within_bound) {
        worst_cs_rho = std::min(worst_cs_rho, d.cs_density_margin);
        worst_ric = std::max(worst_ric, d.riccati_residual);
        ok = ok && d.cs_density_margin >= -1e-6 && d.riccati_residual <= 1e-6;
      }
      if (!ok) ++bad;
    }
  }
  return {bad == 0 && checked > 0,
          fmt("%zu steps over %zu runs; worst margins cs_div %.3g, cs_rho %.3g, riccati %.3g", checked,
              g_runs.size(), worst_cs_div, worst_cs_rho, worst_ric)};
}

// ---------------------------------------------------------------------------

double mean_transport(const Trajectory& t, double from, double to) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 0; k + 1 < t.steps.size(); ++k) {
    if (t.steps[k].time < from - 1e-12 || t.steps[k + 1].time > to + 1e-12) continue;
    sum += functional::transport_theorem_residual(t, k);
    ++count;
  }
  return count ? sum / count : 0.0;
}

Verdict transport_order() {
  double res[2];
  std::size_t steps[2];
  for (int i = 0; i < 2; ++i) {
    Scenario s = uniform_slab(0.5, 1.0, 2.0, 0.0, 0.0, 64, 1.0);
    s.numerics.max_step = 0.02 / (1 << i);
    s.numerics.output_interval = s.numerics.max_step;
    const auto& t = run(s);
    res[i] = mean_transport(t, 0.5, 1.0);
    steps[i] = t.steps.size();
  }
  const double ratio = res[0] / res[1];
  return {ratio >= 3.5 && ratio <= 4.5,
          fmt("mean residual on [0.5, 1] %.3g (dt = 0.02, %zu steps) vs %.3g (dt = 0.01, %zu steps), ratio %.3f",
              res[0], steps[0], res[1], steps[1], ratio)};
}

// ---------------------------------------------------------------------------

Verdict characteristic_identity() {
  double worst = 0.0;
  std::size_t runs = 0, bad = 0;
  for (const auto& t : g_runs) {
    if (t.geometry != Geometry::Slab1D) continue;
    ++runs;
    const double limit = 10.0 * t.numerics.rel_tol;
    for (const auto& d : t.diagnostics) {
      worst = std::max(worst, d.characteristic_residual);
      if (d.characteristic_residual > limit) ++bad;
    }
  }
  return {bad == 0 && runs > 0,
          fmt("%zu slab runs, worst scaled |w' + w^2 + rho - Lambda| = %.3g (limit 10 rel_tol = 1e-9)", runs, worst)};
}

// ---------------------------------------------------------------------------

Verdict comparison_property() {
  const auto& t = run(uniform_slab(0.5, 1.0, 2.0, 0.0, 0.0, 64, 3.0));
  const auto p = riccati::make_params(1.0, 2.0, 0.0, 1, 0.0);
  const double bound = riccati::blowup_time_upper_bound(p);
  double worst = -1e300;
  for (const auto& d : t.diagnostics) {
    if (d.time >= bound) break;
    worst = std::max(worst, d.h_value - riccati::comparison_solution(p, d.time));
  }
  const bool ok = worst <= 1e-6 && t.event && t.event->t_hi <= 2.2214 && std::abs(bound - 2.221441469079183) < 1e-12;
  return {ok, fmt("T_bound = %.10f, max (H - y) = %.3g, event t_hi = %.10f", bound, worst,
                  t.event ? t.event->t_hi : -1.0)};
}

// ---------------------------------------------------------------------------

Verdict equilibrium() {
  const auto& t = run(uniform_slab(0.5, 1.0, 2.0, 0.5, 0.0, 64, 5.0));
  double h = 0.0, force = 0.0, ric = 0.0;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    h = std::max(h, std::abs(t.diagnostics[k].h_value));
    ric = std::max(ric, std::abs(t.diagnostics[k].riccati_residual));
    for (const auto& r : t.steps[k].rates) force = std::max(force, std::abs(r.velocity));
  }
  const bool ok = !t.event && t.final_time() == 5.0 && h <= 1e-10 && force <= 1e-10 && ric <= 1e-10;
  return {ok, fmt("ran to t = %g, max |H| = %.3g, max |force| = %.3g, max |riccati residual| = %.3g",
                  t.final_time(), h, force, ric)};
}

// ---------------------------------------------------------------------------

Verdict sweep_boundary() {
  // rho = 1 on [-1/2, 1/2] with 64 markers: M = 1 and V_sup = 1 exactly.
  const auto base = validate_scenario(uniform_slab(1.0, 0.5, 1.0, 0.0, 0.0, 64, 0.05));
  bool ok = true;
  const auto lam = cli::sweep(base, cli::SweepAxis::Lambda, cli::parse_grid("0:2:17").values(), 4);
  for (const auto& r : lam) {
    const bool case_one = r.certificate_case == CertificateCase::CaseOne;
    ok = ok && !r.error && case_one == (r.value < 1.0);
  }
  // With H(0) < 0 the flip point itself is the boundary extension.
  const auto neg = cli::sweep(validate_scenario(cli::with_initial_functional(base, -0.5)), cli::SweepAxis::Lambda,
                              cli::parse_grid("0:2:17").values(), 4);
  for (const auto& r : neg) {
    const auto c = r.certificate_case;
    if (r.value < 1.0) ok = ok && c == CertificateCase::CaseOne;
    else if (r.value == 1.0) ok = ok && c == CertificateCase::Boundary;
    else ok = ok && c != CertificateCase::CaseOne && c != CertificateCase::Boundary;
    ok = ok && !r.error;
  }
  Scenario two = base.scenario();
  two.lambda = 2.0;
  const auto h0 = cli::sweep(validate_scenario(two), cli::SweepAxis::H0, cli::parse_grid("-2:0:17").values(), 4);
  for (const auto& r : h0)
    ok = ok && !r.error && (r.certificate_case == CertificateCase::CaseTwo) == (r.value < -1.0);
  return {ok, fmt("lambda grid 0:2:17 flips CaseOne -> NoCertificate at 1 (Boundary at 1 when H(0) = -0.5); "
                  "h0 grid -2:0:17 at Lambda = 2 flips CaseTwo -> NoCertificate at -1")};
}

// ---------------------------------------------------------------------------

Verdict pointwise_bound() {
  const auto& t = run(uniform_slab(0.5, 1.0, 2.0, 0.0, -1.0, 64, 2.0));
  const auto bound = riccati::chae_tadmor_pointwise_bound(t.steps.front().markers.front(), 1);
  // Per-characteristic oracle: J = 1 - t - t^2 / 4 vanishes at 2 (sqrt 2 - 1).
  const double exact = 2.0 * (std::sqrt(2.0) - 1.0);
  const bool ok = bound && std::abs(*bound - 1.0) < 1e-15 && t.event && t.event->t_hi <= 1.0 + 1e-6 &&
                  std::abs(t.event->t_hi - exact) < 1e-6;
  return {ok, fmt("bound -N/w0 = %.6g, event t_hi = %.10f, characteristic oracle %.10f", bound ? *bound : -1.0,
                  t.event ? t.event->t_hi : -1.0, exact)};
}

} // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  int failed = 0;
  auto report = [&](int id, const char* title, const std::function<Verdict()>& body) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s criterion %d: %s - %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  };

  SoundnessStats stats;
  report(1, "closed-form blowup time vs oracle pole", closed_form_vs_oracle);
  report(2, "certificate soundness", [&] { return certificate_soundness(stats); });
  report(4, "transport theorem second order", transport_order);
  report(6, "comparison property on the uniform collapse", comparison_property);
  report(7, "equilibrium fixture", equilibrium);
  report(8, "sweep boundary flips", sweep_boundary);
  report(9, "pointwise characteristic bound", pointwise_bound);
  // These two sweep every run made above.
  report(3, "proof-chain inequalities", proof_chain);
  report(5, "exact 1-D characteristic identity", characteristic_identity);

  if (!stats.slack.empty()) {
    std::printf("slack distribution (T_bound - t_hi), %zu runs:", stats.slack.size());
    for (double s : stats.slack) std::printf(" %.4g", s);
    std::printf("\n");
  }
  std::printf("%s: %d criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
