#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "bohm/error.hpp"
#include "bohm/eulerian.hpp"
#include "bohm/guidance.hpp"

using namespace bohm;

namespace {

// Guidance velocity of the free Gaussian at (x, t).
double free_velocity(double x, double t, double c, double sigma0, double k) {
  const double s = oracle::free_width(t, sigma0);
  const double ds = t / (4.0 * sigma0 * sigma0 * s);
  return k + (x - c - k * t) * ds / s;
}

WaveFunction free_state(const Grid& g, double t, double c, double sigma0, double k) {
  return WaveFunction(g, 1, oracle::sample(g, [&](const std::vector<double>& q) {
                        return oracle::free_gaussian(q[0], t, c, sigma0, k);
                      }),
                      {1.0});
}

}  // namespace

TEST_CASE("plane waves move at hbar k over m") {
  const Grid g = make_grid(1, 1, {64}, {2 * std::numbers::pi}, Boundary::periodic);
  const auto psi = WaveFunction(g, 1, oracle::sample(g, [](const std::vector<double>& q) {
                                  return std::exp(oracle::cplx{0, 3.0 * q[0]});
                                }),
                                {2.0}, 1.5);
  const auto v = velocity_field(psi);
  for (std::size_t p = 0; p < g.size(); ++p) CHECK(v.at(p, 0) == doctest::Approx(1.5 * 3.0 / 2.0).epsilon(1e-12));
}

TEST_CASE("gaussian velocity field matches the closed form") {
  const Grid g = make_grid(1, 1, {512}, {40.0}, Boundary::periodic);
  const auto psi = free_state(g, 0.8, 1.0, 1.0, -0.5);
  const auto v = velocity_field(psi);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double x = g.point(p)[0];
    if (std::abs(x - 0.6) > 4.5) continue;
    CHECK(v.at(p, 0) == doctest::Approx(free_velocity(x, 0.8, 1.0, 1.0, -0.5)).epsilon(1e-9));
  }
}

TEST_CASE("velocity field masks nodes with zeros") {
  const Grid g = make_grid(1, 1, {512}, {40.0}, Boundary::periodic);
  const auto v = velocity_field(free_state(g, 0.0, 0.0, 1.0, 2.0), 1e-6);
  CHECK_FALSE(v.valid(0));
  CHECK(v.at(0, 0) == 0.0);
  CHECK(v.valid(256));
}

TEST_CASE("spectral and trilinear probes agree inside the packet") {
  const Grid g = make_grid(1, 1, {512}, {40.0}, Boundary::periodic);
  const auto psi = free_state(g, 0.5, 0.0, 1.0, 1.0);
  const VelocityProbe tri(psi, Interpolation::trilinear);
  const VelocityProbe spec(psi, Interpolation::spectral);
  bohm::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const double q[] = {oracle::uniform(rng, -2.0, 3.0)};
    double a[1], b[1];
    CHECK_FALSE(tri.velocity_at(q, a));
    spec.velocity_at(q, b);
    const double exact = free_velocity(q[0], 0.5, 0.0, 1.0, 1.0);
    CHECK(b[0] == doctest::Approx(exact).epsilon(1e-8));
    // Trilinear interpolation of an affine velocity profile is exact up to
    // the small curvature of the regularised quotient.
    CHECK(a[0] == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("probe velocity is finite and flagged near nodes") {
  const Grid g = make_grid(1, 1, {128}, {2 * std::numbers::pi}, Boundary::periodic);
  // cos(x) has nodes at ±π/2; a small travelling admixture keeps the current nonzero.
  const auto psi = WaveFunction(g, 1, oracle::sample(g, [](const std::vector<double>& q) {
                                  return std::cos(q[0]) + 1e-5 * std::exp(oracle::cplx{0, q[0]});
                                }),
                                {1.0});
  const VelocityProbe probe(psi, Interpolation::trilinear, 1e-3);
  const double q[] = {std::numbers::pi / 2};
  double v[1];
  CHECK(probe.velocity_at(q, v));
  CHECK(std::isfinite(v[0]));
}

TEST_CASE("probe validates its arguments") {
  const Grid g = make_grid(1, 1, {64}, {10.0}, Boundary::box);
  const auto psi = free_state(g, 0.0, 0.0, 1.0, 0.0);
  CHECK_THROWS_AS(VelocityProbe(psi, Interpolation::trilinear, 0.0), Error);
  CHECK_THROWS_AS(VelocityProbe(psi, Interpolation::trilinear, 0.01), Error);
  CHECK_THROWS_AS(interpolation_from_string("cubic"), Error);
  const VelocityProbe probe(psi);
  const double outside[] = {7.0};
  double v[1];
  try {
    probe.velocity_at(outside, v);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("spinor current is the sum over components") {
  const Grid g = make_grid(1, 1, {256}, {30.0}, Boundary::periodic);
  const auto up = free_state(g, 0.0, -1.0, 1.0, 1.0);
  const auto down = free_state(g, 0.0, 1.0, 1.0, -2.0);
  std::vector<oracle::cplx> amp(g.size() * 2);
  for (std::size_t p = 0; p < g.size(); ++p) {
    amp[2 * p] = up.amplitude(p) * 0.6;
    amp[2 * p + 1] = down.amplitude(p) * 0.8;
  }
  const WaveFunction spinor(g, 2, amp, {1.0});
  const auto j = probability_current(spinor);
  const auto ju = probability_current(up);
  const auto jd = probability_current(down);
  for (std::size_t p = 0; p < g.size(); ++p) {
    CHECK(j.at(p, 0) == doctest::Approx(0.36 * ju.at(p, 0) + 0.64 * jd.at(p, 0)).epsilon(1e-10));
  }
}

TEST_CASE("solver output satisfies the continuity equation") {
  const Grid g = make_grid(1, 2, {128, 128}, {24.0, 24.0}, Boundary::periodic);
  const double c[] = {-1.0, 0.5}, s[] = {1.0, 1.3}, k[] = {1.0, -0.5};
  const auto psi0 = gaussian_packet(g, c, s, k);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.potential = PotentialSpec::harmonic({0.5, 0.7}, {1.0, 1.0});
  const auto a = evolve(psi0, cfg, 0.2, 1).snapshots().back();
  const auto b = step_split_spectral(a, cfg.potential, 1e-3);
  CHECK(continuity_residual(a, b, 1e-3) < 1e-6);
}
