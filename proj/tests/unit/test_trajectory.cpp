#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "bohm/error.hpp"
#include "bohm/trajectory.hpp"

using namespace bohm;

namespace {

WaveFunction free_state(const Grid& g, double c, double sigma0, double k) {
  return WaveFunction(g, 1, oracle::sample(g, [&](const std::vector<double>& q) {
                        return oracle::free_gaussian(q[0], 0.0, c, sigma0, k);
                      }),
                      {1.0});
}

EvolutionRecord free_run(const Grid& g, double c, double k, double T = 1.0) {
  SolverConfig cfg;
  cfg.dt = 1e-3;
  return evolve(free_state(g, c, 1.0, k), cfg, T, 10);
}

}  // namespace

TEST_CASE("initial samples reproduce the marginal moments") {
  const Grid g = make_grid(1, 2, {128, 64}, {20.0, 20.0}, Boundary::periodic);
  const double c[] = {1.0, -2.0}, s[] = {1.0, 2.0}, k[] = {0.0, 0.0};
  const auto psi = gaussian_packet(g, c, s, k);
  REQUIRE(is_product_density(g, density(psi).values));
  const std::size_t n = 40000;
  const auto x = sample_initial(psi, n, 17);
  for (int a = 0; a < 2; ++a) {
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += x[2 * i + static_cast<std::size_t>(a)];
    m /= double(n);
    for (std::size_t i = 0; i < n; ++i) v += std::pow(x[2 * i + static_cast<std::size_t>(a)] - m, 2);
    v /= double(n - 1);
    const double sd = s[a] / std::sqrt(double(n));
    CHECK(std::abs(m - c[a]) < 5 * sd);
    CHECK(std::sqrt(v) == doctest::Approx(s[a]).epsilon(0.03));
  }
  CHECK(marginal_tv_distance(g, density(psi).values, x) < 0.03);
}

TEST_CASE("sampling is seed-deterministic") {
  const Grid g = make_grid(1, 1, {256}, {20.0}, Boundary::periodic);
  const auto psi = free_state(g, 0.0, 1.0, 0.0);
  CHECK(sample_initial(psi, 100, 5) == sample_initial(psi, 100, 5));
  CHECK(sample_initial(psi, 100, 5) != sample_initial(psi, 100, 6));
}

TEST_CASE("entangled densities are sampled by the chain") {
  const Grid g = make_grid(1, 2, {64, 64}, {16.0, 16.0}, Boundary::periodic);
  std::vector<oracle::cplx> amp(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto q = g.point(p);
    // Correlated Gaussian: x and y tied together.
    amp[p] = std::exp(-(q[0] * q[0] + q[1] * q[1] - 1.6 * q[0] * q[1]) / 4.0);
  }
  const auto psi = normalize(WaveFunction(g, 1, amp, {1.0, 1.0}));
  const auto rho = density(psi).values;
  REQUIRE_FALSE(is_product_density(g, rho));
  const auto x = sample_initial(psi, 8000, 3);
  double cxy = 0.0, cxx = 0.0;
  for (std::size_t i = 0; i < 8000; ++i) {
    cxy += x[2 * i] * x[2 * i + 1];
    cxx += x[2 * i] * x[2 * i];
  }
  // Covariance matrix is the inverse of [[1, -0.8], [-0.8, 1]]: correlation 0.8.
  CHECK(cxy / cxx == doctest::Approx(0.8).epsilon(0.05));
  CHECK(marginal_tv_distance(g, rho, x) < 0.05);
}

TEST_CASE("free trajectories follow the scaling flow") {
  const Grid g = make_grid(1, 1, {512}, {40.0}, Boundary::periodic);
  const auto rec = free_run(g, -1.0, 1.0);
  const double q0[] = {-2.5, -1.0, 0.3, 1.1};
  const auto ens = propagate_ensemble(rec, q0, 1e-2);
  REQUIRE(ens.times->size() == 101);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& tr = ens.trajectories[i];
    CHECK(tr.all_ok());
    for (std::size_t s = 0; s < tr.size(); s += 10) {
      const double t = (*ens.times)[s];
      CHECK(tr.point(s)[0] == doctest::Approx(oracle::free_trajectory(q0[i], t, -1.0, 1.0, 1.0)).epsilon(1e-8));
    }
  }
}

TEST_CASE("trajectories do not depend on the worker count") {
  const Grid g = make_grid(1, 1, {256}, {30.0}, Boundary::periodic);
  const auto rec = free_run(g, 0.0, 0.5, 0.5);
  const auto q0 = sample_initial(rec.snapshot(0), 64, 9);
  TrajectoryOptions one, four;
  four.threads = 4;
  const auto a = propagate_ensemble(rec, q0, 1e-2, one);
  const auto b = propagate_ensemble(rec, q0, 1e-2, four);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.trajectories[i].points == b.trajectories[i].points);
}

TEST_CASE("output stride thins the recorded samples") {
  const Grid g = make_grid(1, 1, {256}, {30.0}, Boundary::periodic);
  const auto rec = free_run(g, 0.0, 0.5, 0.5);
  const double q0[] = {0.2};
  TrajectoryOptions opt;
  opt.output_stride = 5;
  const auto tr = integrate_trajectory(rec, q0, 1e-2, opt);
  CHECK(tr.size() == 11);
  CHECK((*tr.times)[1] == doctest::Approx(0.05));
  CHECK_THROWS_AS(integrate_trajectory(rec, q0, 0.03), Error);
}

TEST_CASE("box exits freeze the point and flag it") {
  const Grid g = make_grid(1, 1, {256}, {20.0}, Boundary::box);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.method = Method::crank_nicolson;
  const auto psi0 = free_state(g, 6.0, 1.0, 8.0);
  const auto rec = evolve(psi0, cfg, 0.6, 10);
  const double q0[] = {8.0};
  const auto tr = integrate_trajectory(rec, q0, 1e-2);
  CHECK(tr.flags.back() == TrajectoryFlag::left_domain);
  const auto last = tr.point(tr.size() - 1)[0];
  CHECK(last == tr.point(tr.size() - 2)[0]);
  CHECK(to_string(TrajectoryFlag::left_domain) == "left_domain");
}

TEST_CASE("ensemble stays equivariant and uniform samples do not") {
  const Grid g = make_grid(1, 1, {512}, {40.0}, Boundary::periodic);
  const auto rec = free_run(g, 0.0, 1.0);
  const auto q0 = sample_initial(rec.snapshot(0), 20000, 1);
  const auto ens = propagate_ensemble(rec, q0, 1e-2);
  for (double t : {0.0, 0.5, 1.0}) CHECK(equivariance_distance(ens, rec, t) < 0.03);
  bohm::Rng rng(4);
  std::vector<double> uniform(20000);
  for (auto& x : uniform) x = oracle::uniform(rng, -20.0, 20.0);
  CHECK(marginal_tv_distance(g, density(rec.snapshot(0)).values, uniform) > 0.2);
  const auto hist = empirical_density(ens, 1.0, g);
  double total = 0.0;
  for (double v : hist.values) total += v * g.cell_volume();
  CHECK(total == doctest::Approx(1.0));
}
