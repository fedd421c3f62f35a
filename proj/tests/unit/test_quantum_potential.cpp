#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "bohm/error.hpp"
#include "bohm/quantum_potential.hpp"

using namespace bohm;

namespace {

WaveFunction free_state(const Grid& g, double t, double c, double sigma0, double k) {
  return WaveFunction(g, 1, oracle::sample(g, [&](const std::vector<double>& q) {
                        return oracle::free_gaussian(q[0], t, c, sigma0, k);
                      }),
                      {1.0});
}

EvolutionRecord free_run(double k, double T) {
  const Grid g = make_grid(1, 1, {512}, {40.0}, Boundary::periodic);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  return evolve(free_state(g, 0.0, 0.0, 1.0, k), cfg, T, 10);
}

}  // namespace

TEST_CASE("harmonic ground state has constant total potential") {
  const Grid g = make_grid(1, 1, {256}, {12.0}, Boundary::periodic);
  const double omega = 1.3, m = 2.0;
  const double sigma = std::sqrt(1.0 / (2 * m * omega));
  const double c[] = {0.0}, s[] = {sigma}, k[] = {0.0};
  PacketOptions opt;
  opt.masses = {m};
  const auto psi = gaussian_packet(g, c, s, k, opt);
  const auto vq = quantum_potential(psi);
  const auto v = PotentialSpec::harmonic({omega}, {m}).sample(g);
  const auto ind = classicality_indicator(psi);
  int checked = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!vq.valid(p)) continue;
    ++checked;
    CHECK(v[p] + vq.values[p] == doctest::Approx(omega / 2).epsilon(1e-9));
    CHECK(ind.values[p] == doctest::Approx(m * omega * omega * std::abs(g.point(p)[0])).scale(1.0).epsilon(1e-7));
  }
  CHECK(checked > 50);
}

TEST_CASE("free gaussian quantum potential and its gradient") {
  const Grid g = make_grid(1, 1, {512}, {40.0}, Boundary::periodic);
  const double t = 0.6, c0 = 0.5, k = 1.0;
  const auto psi = free_state(g, t, c0, 1.0, k);
  const double s = oracle::free_width(t, 1.0), mu = c0 + k * t;
  const auto vq = quantum_potential(psi);
  const auto gq = quantum_potential_gradient(psi);
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!vq.valid(p)) continue;
    const double d = g.point(p)[0] - mu;
    CHECK(vq.values[p] == doctest::Approx(1 / (4 * s * s) - d * d / (8 * std::pow(s, 4))).scale(1.0).epsilon(1e-8));
    CHECK(gq.at(p, 0) == doctest::Approx(-d / (4 * std::pow(s, 4))).scale(1.0).epsilon(1e-8));
  }
}

TEST_CASE("force probe adds the external gradient") {
  const Grid g = make_grid(1, 1, {256}, {20.0}, Boundary::periodic);
  const double c[] = {0.0}, s[] = {1.0}, k[] = {0.0};
  const auto psi = gaussian_packet(g, c, s, k);
  const auto v = PotentialSpec::linear_gradient({0.75});
  const ForceProbe probe(psi, v);
  const double q[] = {0.3};
  double f[1];
  CHECK(probe.force_at(q, f));
  CHECK(f[0] == doctest::Approx(0.3 / 4.0 - 0.75).epsilon(1e-4));
}

TEST_CASE("newton residual is small and second order on free trajectories") {
  const auto rec = free_run(1.0, 1.0);
  const double q0[] = {-1.5, -0.4, 0.2, 1.3};
  const auto fine = propagate_ensemble(rec, q0, 1e-3);
  const auto coarse = propagate_ensemble(rec, q0, 2e-3);
  const auto rf = newton_residual(fine, rec, PotentialSpec::zero());
  const auto rc = newton_residual(coarse, rec, PotentialSpec::zero());
  MESSAGE("fine " << rf.max_residual() << " coarse " << rc.max_residual());
  CHECK(rf.max_residual() < 1e-3);
  CHECK(rf.excluded_fraction == 0.0);
  const double ratio = rc.max_residual() / rf.max_residual();
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("second-order law with guidance velocity reproduces the trajectory") {
  const auto rec = free_run(1.0, 1.0);
  const double q0[] = {0.7};
  const VelocityProbe probe(rec.snapshot(0));
  const auto v0 = probe.velocity_at(q0);
  const auto path = integrate_newton(rec, PotentialSpec::zero(), q0, v0, 1e-2);
  const auto tr = integrate_trajectory(rec, q0, 1e-2);
  CHECK_FALSE(path.masked);
  CHECK(std::abs(path.points.back() - tr.points.back()) < 1e-6);
  CHECK(std::abs(path.points.back() - oracle::free_trajectory(0.7, 1.0, 0.0, 1.0, 1.0)) < 1e-6);

  const double v_off[] = {1.1 * v0[0]};
  const auto off = integrate_newton(rec, PotentialSpec::zero(), q0, v_off, 1e-2);
  CHECK(std::abs(off.points.back() - tr.points.back()) > 1e-5);
}

TEST_CASE("stationary state gives zero residual for a resting particle") {
  // Wide box: spectral third derivatives see the periodic seam otherwise.
  const Grid g = make_grid(1, 1, {256}, {20.0}, Boundary::periodic);
  const double sigma = std::sqrt(0.5);
  const double c[] = {0.0}, s[] = {sigma}, k[] = {0.0};
  const auto psi0 = gaussian_packet(g, c, s, k);
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.potential = PotentialSpec::harmonic({1.0}, {1.0});
  const auto rec = evolve(psi0, cfg, 0.1, 100);
  const double q0[] = {0.8};
  const auto tr = integrate_trajectory(rec, q0, 1e-2);
  const auto rep = newton_residual(tr, rec, cfg.potential);
  CHECK(rep.max_residual() < 1e-8);
}

TEST_CASE("indicator falls eightfold when the packet doubles in width") {
  const Grid g = make_grid(1, 1, {512}, {60.0}, Boundary::periodic);
  auto peak = [&](double sigma) {
    const double c[] = {0.0}, s[] = {sigma}, k[] = {0.0};
    const auto ind = classicality_indicator(gaussian_packet(g, c, s, k));
    double m = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
      if (ind.valid(p)) m = std::max(m, ind.values[p]);
    return m;
  };
  CHECK(peak(1.0) / peak(2.0) == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("plane waves have no quantum potential") {
  const Grid g = make_grid(1, 1, {64}, {2 * std::numbers::pi}, Boundary::periodic);
  const auto psi = WaveFunction(g, 1, oracle::sample(g, [](const std::vector<double>& q) {
                                  return std::exp(oracle::cplx{0, 2.0 * q[0]});
                                }),
                                {1.0});
  const auto vq = quantum_potential(psi);
  const auto ind = classicality_indicator(psi);
  for (std::size_t p = 0; p < g.size(); ++p) {
    CHECK(std::abs(vq.values[p]) < 1e-12);
    CHECK(ind.values[p] < 1e-12);
  }
}

TEST_CASE("all-masked trajectories are a degenerate input") {
  const Grid g = make_grid(1, 1, {256}, {40.0}, Boundary::periodic);
  const double c[] = {-10.0}, s[] = {0.5}, k[] = {0.0};
  const auto psi0 = gaussian_packet(g, c, s, k);
  SolverConfig cfg;
  cfg.dt = 1e-2;
  const auto rec = evolve(psi0, cfg, 0.1, 1);
  const double q0[] = {10.0};
  const auto tr = integrate_trajectory(rec, q0, 1e-2);
  try {
    newton_residual(tr, rec, PotentialSpec::zero());
    FAIL("expected degenerate input");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_input);
  }
}
