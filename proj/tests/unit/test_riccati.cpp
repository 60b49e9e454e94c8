#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support.hpp"
#include "dustlab/riccati.hpp"

using namespace dustlab;
using namespace dustlab::riccati;

TEST_CASE("spot values of the blowup bound") {
  CHECK(blowup_time_upper_bound(make_params(1, 1, 0, 1, 0)) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK(blowup_time_upper_bound(make_params(1, 1, 2, 1, -2)) == doctest::Approx(0.5493061443340549).epsilon(1e-15));
  CHECK(blowup_time_upper_bound({1.0, 0.0, -2.0}) == doctest::Approx(0.5));
  // Uniform slab, M = 1, V_sup = 2: (pi/2) / sqrt(1/2).
  CHECK(blowup_time_upper_bound(make_params(1, 2, 0, 1, 0)) == doctest::Approx(2.221441469079183).epsilon(1e-15));
}

TEST_CASE("spot values agree with the oracle pole") {
  for (const auto& p : {make_params(1, 1, 0, 1, 0), make_params(1, 1, 2, 1, -2), RiccatiParams{1.0, 0.0, -2.0},
                        make_params(1, 2, 0, 1, 0)}) {
    const double t = blowup_time_upper_bound(p);
    const auto path = integrate_comparison_ode(p, 2.0 * t + 1.0);
    const auto& pole = path.pole_bracket();
    CHECK(pole.hi - pole.lo <= kPoleBracketWidth);
    CHECK(std::abs(0.5 * (pole.lo + pole.hi) - t) <= 1e-6 * std::max(1.0, t));
  }
}

TEST_CASE("case selection") {
  SUBCASE("Lambda below M / V_sup") {
    const auto c = check_blowup_conditions(1.0, 1.0, 0.5, 1, 3.0);
    CHECK(c.certificate_case == CertificateCase::CaseOne);
    CHECK(c.t_bound);
    CHECK_FALSE(c.threshold_case2);
  }
  SUBCASE("boundary") {
    const auto c = check_blowup_conditions(1.0, 1.0, 1.0, 1, -0.5);
    CHECK(c.certificate_case == CertificateCase::Boundary);
    CHECK(c.boundary_extension);
    CHECK(*c.t_bound == doctest::Approx(2.0));
    CHECK(check_blowup_conditions(1.0, 1.0, 1.0, 1, 0.0).certificate_case == CertificateCase::NoCertificate);
  }
  SUBCASE("case two is strict at the threshold") {
    CHECK(*case_two_threshold(1.0, 1.0, 2.0, 1) == 1.0);
    CHECK(check_blowup_conditions(1.0, 1.0, 2.0, 1, -1.0).certificate_case == CertificateCase::NoCertificate);
    CHECK(check_blowup_conditions(1.0, 1.0, 2.0, 1, std::nextafter(-1.0, -2.0)).certificate_case ==
          CertificateCase::CaseTwo);
  }
  CHECK_THROWS_AS(make_params(0.0, 1.0, 0.0, 1, 0.0), Error);
  CHECK_THROWS_AS(blowup_time_upper_bound(make_params(1, 1, 2, 1, 0.5)), Error);
}

TEST_CASE("comparison solution branches") {
  const auto p = make_params(1, 1, 0, 1, 0);
  CHECK(comparison_solution(p, 0.0) == doctest::Approx(0.0));
  CHECK(comparison_solution(p, 1.0) == doctest::Approx(-std::tan(1.0)));
  CHECK_THROWS_AS(comparison_solution(p, 2.0), Error);
  // b < 0 global branches relax to +c = 1.
  const auto tanh_branch = make_params(1, 1, 2, 1, 0.0);
  CHECK(comparison_solution(tanh_branch, 1.0) == doctest::Approx(std::tanh(1.0)));
  const auto coth_branch = make_params(1, 1, 2, 1, 3.0);
  CHECK(comparison_solution(coth_branch, 20.0) == doctest::Approx(1.0));
  CHECK(comparison_solution(make_params(1, 1, 2, 1, -1.0), 5.0) == -1.0);
}

TEST_CASE("property: closed form solves the comparison equation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    RiccatiParams p{testing::log_uniform(rng, 0.1, 10.0), testing::uniform(rng, -3.0, 3.0),
                    testing::uniform(rng, -5.0, 5.0)};
    if (trial % 10 == 0) p.b = 0.0;
    const double horizon = has_finite_blowup(p) ? 0.9 * blowup_time_upper_bound(p) : 2.0;
    const double t = testing::uniform(rng, 0.0, horizon), h = 1e-5;
    const double y = comparison_solution(p, t);
    const double dy = (comparison_solution(p, t + h) - comparison_solution(p, t - std::min(h, t))) /
                      (h + std::min(h, t));
    CHECK(dy == doctest::Approx(-p.a * y * y - p.b).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("property: lowering Lambda keeps the certificate and never raises T") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const double m = testing::log_uniform(rng, 0.1, 5.0), v = testing::log_uniform(rng, 0.5, 10.0);
    const int n = 1 + static_cast<int>(rng() % 3);
    const double h0 = testing::uniform(rng, -6.0, 3.0);
    const double hi = testing::uniform(rng, -1.0, 3.0), lo = hi - testing::log_uniform(rng, 1e-3, 2.0);
    const auto c_hi = check_blowup_conditions(m, v, hi, n, h0), c_lo = check_blowup_conditions(m, v, lo, n, h0);
    if (!c_hi.t_bound) continue;
    REQUIRE(c_lo.t_bound);
    CHECK(*c_lo.t_bound <= *c_hi.t_bound * (1.0 + 1e-12));
  }
}

TEST_CASE("property: oracle path matches the closed form away from the pole") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    RiccatiParams p{testing::log_uniform(rng, 0.2, 5.0), testing::uniform(rng, -2.0, 2.0),
                    testing::uniform(rng, -3.0, 3.0)};
    const double horizon = has_finite_blowup(p) ? blowup_time_upper_bound(p) : 3.0;
    const auto path = integrate_comparison_ode(p, 0.8 * horizon);
    for (std::size_t i = 0; i < path.times.size(); ++i) {
      const double exact = comparison_solution(p, path.times[i]);
      CHECK(path.values[i] == doctest::Approx(exact).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("property: case one bounds converge to the boundary formula") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const double m = testing::log_uniform(rng, 0.2, 5.0), v = testing::log_uniform(rng, 0.5, 5.0);
    const int n = 1 + static_cast<int>(rng() % 3);
    const double h0 = -testing::log_uniform(rng, 0.1, 5.0), lam = m / v;
    const double t0 = *check_blowup_conditions(m, v, lam, n, h0).t_bound;
    CHECK(t0 == doctest::Approx(-m * n / h0));
    double prev = 0.0;
    for (double eps : {1e-6, 1e-8, 1e-10}) {
      const auto c = check_blowup_conditions(m, v, lam * (1.0 - eps), n, h0);
      REQUIRE(c.certificate_case == CertificateCase::CaseOne);
      const double gap = std::abs(*c.t_bound - t0);
      // T - T_boundary is linear in the distance to the boundary.
      if (prev > 1e-9 * t0) CHECK(gap < 0.05 * prev);
      prev = gap;
    }
    CHECK(prev <= 1e-6 * t0);
  }
}

TEST_CASE("pointwise characteristic bound") {
  LagrangianMarker m;
  m.density = 0.5;
  m.eig_radial = -1.0;
  CHECK(*chae_tadmor_pointwise_bound(m, 1) == doctest::Approx(1.0));
  m.eig_tangential = -1.0;
  CHECK(*chae_tadmor_pointwise_bound(m, 3) == doctest::Approx(1.0));
  m.eig_radial = m.eig_tangential = 0.2;
  CHECK_FALSE(chae_tadmor_pointwise_bound(m, 3));
}
