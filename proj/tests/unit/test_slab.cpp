#include <doctest.h>

#include <cmath>
#include <random>

#include "../support.hpp"
#include "dustlab/simulation.hpp"
#include "dustlab/slab.hpp"

using namespace dustlab;
using namespace dustlab::slab;
using dustlab::testing::SlabHomogeneous;
using dustlab::testing::uniform_slab;

namespace {

std::vector<LagrangianMarker> random_markers(std::mt19937_64& rng, std::size_t n) {
  std::vector<LagrangianMarker> ms(n);
  double x = testing::uniform(rng, -2.0, 0.0);
  for (auto& m : ms) {
    x += testing::uniform(rng, 0.01, 0.2);
    m.position = x;
    m.velocity = testing::uniform(rng, -1.0, 1.0);
    m.density = testing::uniform(rng, 0.1, 2.0);
    m.eig_radial = testing::uniform(rng, -1.0, 1.0);
    m.mass_weight = testing::uniform(rng, 0.01, 0.1);
  }
  return ms;
}

} // namespace

TEST_CASE("a lone marker feels no force") {
  LagrangianMarker m;
  m.position = 0.3;
  m.mass_weight = 2.0;
  CHECK(slab_force(make_state({m}, 0.0, 0.7), 0) == 0.0);
}

TEST_CASE("two equal markers attract with half the partner mass") {
  LagrangianMarker a, b;
  a.position = -0.5;
  b.position = 0.5;
  a.mass_weight = b.mass_weight = 0.8;
  const auto st = make_state({a, b}, 0.0, 0.0);
  CHECK(slab_force(st, 0) == doctest::Approx(0.4));
  CHECK(slab_force(st, 1) == doctest::Approx(-0.4));
}

TEST_CASE("uniform slab force is linear: -(rho0 - Lambda) x") {
  const auto v = validate_scenario(uniform_slab(0.5, 1.0, 2.0, 0.2, 0.0, 32));
  const auto st = make_state(initial_markers(v), 0.0, 0.2);
  for (std::size_t j = 0; j < st.markers.size(); ++j)
    CHECK(slab_force(st, j) == doctest::Approx(-0.3 * st.markers[j].position).epsilon(1e-13));
}

TEST_CASE("slab errors") {
  CHECK_THROWS_AS(slab_rhs(SlabFieldState{}), Error);
  LagrangianMarker a, b;
  a.position = 0.5;
  b.position = 0.5;
  a.mass_weight = b.mass_weight = 1.0;
  try {
    slab_rhs(make_state({a, b}, 0.0, 0.0));
    FAIL("expected crossing error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CrossedMarkers);
  }
}

TEST_CASE("property: flat right-hand side agrees with the marker form") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double lambda = testing::uniform(rng, -1.0, 1.0);
    auto ms = random_markers(rng, 3 + rng() % 40);
    const auto st = make_state(ms, 0.0, lambda);
    const auto rates = slab_rhs(st);
    std::vector<double> masses, y(kFields * ms.size()), dy(y.size());
    for (const auto& m : ms) masses.push_back(m.mass_weight);
    pack(ms, y);
    rhs_flat(masses, lambda, y, dy);
    for (std::size_t j = 0; j < ms.size(); ++j) {
      CHECK(dy[kFields * j + 1] == doctest::Approx(rates[j].velocity).epsilon(1e-12));
      CHECK(dy[kFields * j + 3] == doctest::Approx(rates[j].eig_radial).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: forces are invariant under a Galilean shift") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const double lambda = testing::uniform(rng, -1.0, 1.0);
    auto ms = random_markers(rng, 2 + rng() % 30);
    auto moved = ms;
    const double dx = testing::uniform(rng, -5.0, 5.0), dv = testing::uniform(rng, -3.0, 3.0);
    for (auto& m : moved) {
      m.position += dx;
      m.velocity += dv;
    }
    const auto a = make_state(ms, 0.0, lambda), b = make_state(moved, 0.0, lambda);
    for (std::size_t j = 0; j < ms.size(); ++j)
      CHECK(slab_force(a, j) == doctest::Approx(slab_force(b, j)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("homogeneous slab matches the closed-form Jacobian solution") {
  // J = 1 - 0.5 t - 0.15 t^2 stays positive up to t = 1.
  Scenario s = uniform_slab(0.5, 1.0, 2.0, 0.2, -0.5, 32, 1.0);
  const auto traj = integrate_slab(validate_scenario(s));
  REQUIRE_FALSE(traj.event);
  REQUIRE(traj.final_time() == 1.0);
  const SlabHomogeneous exact{0.5, -0.5, 0.2};
  for (const auto& m : traj.steps.back().markers) {
    CHECK(m.density == doctest::Approx(exact.density(1.0)).epsilon(1e-8));
    CHECK(m.eig_radial == doctest::Approx(exact.gradient(1.0)).epsilon(1e-8));
  }
}

TEST_CASE("uniform slab at rest collapses at t = 2") {
  const auto traj = integrate_slab(validate_scenario(uniform_slab(0.5, 1.0, 2.0, 0.0, 0.0, 64, 3.0)));
  REQUIRE(traj.event);
  CHECK(traj.event->t_hi <= 2.0);
  CHECK(traj.event->t_hi > 2.0 - 1e-6);
  CHECK(traj.event->t_hi - traj.event->t_lo <= 1e-8 * 2.0 + 1e-15);
}

TEST_CASE("property: density stays positive and mass is carried unchanged") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    Scenario s = uniform_slab(1.0, 1.0, 4.0, testing::uniform(rng, 0.0, 1.0), 0.0, 48, 1.5);
    s.density.kind = DensityKind::Gaussian;
    s.density.value = testing::uniform(rng, 0.2, 2.0);
    s.density.width = testing::uniform(rng, 0.2, 1.0);
    s.velocity.kind = VelocityKind::Hubble;
    s.velocity.rate = testing::uniform(rng, -0.5, 0.5);
    const auto traj = integrate_slab(validate_scenario(s));
    const auto& first = traj.steps.front().markers;
    for (const auto& snap : traj.steps) {
      for (std::size_t j = 0; j < snap.markers.size(); ++j) {
        CHECK(snap.markers[j].density > 0.0);
        CHECK(snap.markers[j].mass_weight == first[j].mass_weight);
      }
    }
  }
}
