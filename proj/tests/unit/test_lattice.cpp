#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "bohm/dump.hpp"
#include "bohm/error.hpp"
#include "bohm/interpolate.hpp"
#include "bohm/potential.hpp"
#include "bohm/spectral.hpp"

using namespace bohm;

TEST_CASE("grid geometry is centred and row-major") {
  const Grid g = make_grid(1, 2, {8, 16}, {4.0, 8.0}, Boundary::periodic);
  CHECK(g.dimension() == 2);
  CHECK(g.size() == 128);
  CHECK(g.spacing(0) == doctest::Approx(0.5));
  CHECK(g.lower(1) == doctest::Approx(-4.0));
  CHECK(g.stride(1) == 1);
  CHECK(g.stride(0) == 16);
  const auto q = g.point(16 * 3 + 5);
  CHECK(q[0] == doctest::Approx(-2.0 + 3 * 0.5));
  CHECK(q[1] == doctest::Approx(-4.0 + 5 * 0.5));
  CHECK(g.unflatten(16 * 3 + 5) == std::vector<int>{3, 5});
}

TEST_CASE("periodic wrap and cell lookup agree") {
  const Grid g = make_grid(1, 1, {16}, {8.0}, Boundary::periodic);
  bohm::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double x = oracle::uniform(rng, -40.0, 40.0);
    const double w = g.wrap(0, x);
    CHECK(w >= g.lower(0));
    CHECK(w < g.lower(0) + g.extent(0));
    const double shift = (x - w) / g.extent(0);
    CHECK(std::abs(shift - std::round(shift)) < 1e-9);
    CHECK(g.cell_of(0, x) == g.cell_of(0, w));
  }
}

TEST_CASE("box grids reject points outside the hull") {
  const Grid g = make_grid(1, 1, {16}, {8.0}, Boundary::box);
  const double inside[] = {0.3};
  const double outside[] = {4.5};
  CHECK(g.contains(inside));
  CHECK_FALSE(g.contains(outside));
  CHECK(g.cell_of(0, 100.0) == -1);
}

TEST_CASE("invalid grids are refused") {
  CHECK_THROWS_AS(make_grid(1, 1, {12}, {1.0}, Boundary::periodic), Error);
  CHECK_THROWS_AS(make_grid(1, 1, {16}, {-1.0}, Boundary::periodic), Error);
  CHECK_THROWS_AS(make_grid(2, 2, {8, 8, 8, 8}, {1, 1, 1, 1}, Boundary::periodic), Error);
  CHECK_THROWS_AS(boundary_from_string("torus"), Error);
  CHECK_NOTHROW(make_grid(1, 1, {12}, {1.0}, Boundary::box, false));
}

TEST_CASE("gaussian packet is normalised with the requested moments") {
  const Grid g = make_grid(1, 1, {512}, {40.0}, Boundary::periodic);
  const double c[] = {1.5}, s[] = {1.2}, k[] = {0.7};
  const WaveFunction psi = gaussian_packet(g, c, s, k);
  CHECK(norm_squared(psi) == doctest::Approx(1.0).epsilon(1e-12));
  double mean = 0.0, var = 0.0;
  const auto rho = density(psi);
  for (std::size_t p = 0; p < g.size(); ++p) mean += g.point(p)[0] * rho.values[p] * g.cell_volume();
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double d = g.point(p)[0] - mean;
    var += d * d * rho.values[p] * g.cell_volume();
  }
  CHECK(mean == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(std::sqrt(var) == doctest::Approx(1.2).epsilon(1e-10));
  const auto ref = oracle::sample(g, [](const std::vector<double>& q) { return oracle::free_gaussian(q[0], 0.0, 1.5, 1.2, 0.7); });
  CHECK(oracle::l2_error(psi, ref) < 1e-12);
}

TEST_CASE("strict packets refuse heavy tails") {
  const Grid g = make_grid(1, 1, {64}, {4.0}, Boundary::box);
  const double c[] = {0.0}, s[] = {1.5}, k[] = {0.0};
  PacketOptions strict;
  strict.strict = true;
  CHECK(packet_tail_mass(g, c, s) > 1e-3);
  CHECK_THROWS_AS(gaussian_packet(g, c, s, k, strict), Error);
}

TEST_CASE("spectral derivatives of trigonometric functions are exact") {
  const Grid g = make_grid(1, 2, {32, 16}, {2 * std::numbers::pi, 2 * std::numbers::pi}, Boundary::periodic);
  std::vector<double> f(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto q = g.point(p);
    f[p] = std::sin(3 * q[0]) * std::cos(2 * q[1]);
  }
  const Differentiator d(g, std::span<const double>(f));
  const auto fx = d.derivative_real({1, 0, 0});
  const auto fyy = d.derivative_real({0, 2, 0});
  const auto fxy = d.derivative_real({1, 1, 0});
  double err = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto q = g.point(p);
    err = std::max(err, std::abs(fx[p] - 3 * std::cos(3 * q[0]) * std::cos(2 * q[1])));
    err = std::max(err, std::abs(fyy[p] + 4 * f[p]));
    err = std::max(err, std::abs(fxy[p] + 6 * std::cos(3 * q[0]) * std::sin(2 * q[1])));
  }
  CHECK(err < 1e-11);
}

TEST_CASE("box stencils are fourth order") {
  auto error_at = [](int n) {
    const Grid g = make_grid(1, 1, {n}, {6.0}, Boundary::box, false);
    std::vector<double> f(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) f[p] = std::exp(-g.point(p)[0] * g.point(p)[0]);
    const auto df = Differentiator(g, std::span<const double>(f)).derivative_real({1, 0, 0});
    double err = 0.0;
    for (std::size_t p = 4; p + 4 < g.size(); ++p) {
      const double x = g.point(p)[0];
      err = std::max(err, std::abs(df[p] + 2 * x * std::exp(-x * x)));
    }
    return err;
  };
  const double ratio = error_at(61) / error_at(121);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("gradient and divergence of a periodic field") {
  const Grid g = make_grid(1, 2, {32, 32}, {2 * std::numbers::pi, 2 * std::numbers::pi}, Boundary::periodic);
  std::vector<double> f(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto q = g.point(p);
    f[p] = std::sin(q[0]) + std::cos(2 * q[1]);
  }
  const auto grad = gradient(g, f);
  const auto lap = divergence(g, grad);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto q = g.point(p);
    CHECK(lap[p] == doctest::Approx(-std::sin(q[0]) - 4 * std::cos(2 * q[1])).epsilon(1e-9));
  }
}

TEST_CASE("fft round trip restores the data") {
  const Grid g = make_grid(1, 3, {8, 4, 16}, {1, 2, 3}, Boundary::periodic);
  bohm::Rng rng(3);
  std::vector<cplx> data(g.size() * 2);
  for (auto& z : data) z = {rng.normal(), rng.normal()};
  auto copy = data;
  fft_forward(g, copy, 2);
  fft_backward(g, copy, 2);
  double err = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) err = std::max(err, std::abs(copy[i] / double(g.size()) - data[i]));
  CHECK(err < 1e-13);
}

TEST_CASE("multilinear interpolation reproduces affine functions") {
  // Property: for random affine f and random points, interpolation is exact.
  bohm::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g = make_grid(1, 3, {8, 8, 8}, {4.0, 5.0, 6.0}, Boundary::box);
    const double a0 = rng.normal(), a1 = rng.normal(), a2 = rng.normal(), b = rng.normal();
    std::vector<double> f(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto q = g.point(p);
      f[p] = b + a0 * q[0] + a1 * q[1] + a2 * q[2];
    }
    for (int i = 0; i < 20; ++i) {
      double q[3];
      for (int a = 0; a < 3; ++a) q[a] = oracle::uniform(rng, g.lower(a), g.coordinate(a, g.points(a) - 1));
      Stencil st;
      REQUIRE(multilinear_stencil(g, q, st));
      CHECK(interpolate_scalar(st, f) == doctest::Approx(b + a0 * q[0] + a1 * q[1] + a2 * q[2]).epsilon(1e-12));
    }
  }
}

TEST_CASE("potentials sample and differentiate consistently") {
  const Grid g = make_grid(1, 2, {16, 16}, {4.0, 4.0}, Boundary::periodic);
  const auto v = PotentialSpec::harmonic({1.0, 2.0}, {1.0, 3.0});
  const double q[] = {0.4, -0.3};
  CHECK(v.value(q) == doctest::Approx(0.5 * 0.16 + 0.5 * 3.0 * 4.0 * 0.09));
  double grad[2];
  v.gradient(q, grad);
  CHECK(grad[0] == doctest::Approx(0.4));
  CHECK(grad[1] == doctest::Approx(3.0 * 4.0 * -0.3));

  const auto c = PotentialSpec::soft_coulomb({1.0, -1.0}, 0.5, 1);
  const double h = 1e-6;
  double num[2];
  for (int a = 0; a < 2; ++a) {
    double qp[] = {q[0], q[1]}, qm[] = {q[0], q[1]};
    qp[a] += h;
    qm[a] -= h;
    num[a] = (c.value(qp) - c.value(qm)) / (2 * h);
  }
  c.gradient(q, grad);
  CHECK(grad[0] == doctest::Approx(num[0]).epsilon(1e-7));
  CHECK(grad[1] == doctest::Approx(num[1]).epsilon(1e-7));

  const auto walled = PotentialSpec::zero().with_box_wall({});
  const auto sampled = walled.sample(g);
  CHECK(sampled.front() > 1e3);
  CHECK(sampled[g.size() / 2 + 8] == 0.0);
}

TEST_CASE("grid dumps round trip at single precision") {
  const Grid g = make_grid(1, 2, {8, 4}, {2.0, 1.0}, Boundary::periodic);
  bohm::Rng rng(5);
  std::vector<cplx> v(g.size() * 2);
  for (auto& z : v) z = {rng.normal(), rng.normal()};
  const auto path = std::filesystem::temp_directory_path() / "bohm_unit_dump.bin";
  write_grid_dump(path, g, 2, v);
  const GridDump d = read_grid_dump(path);
  CHECK(d.points == std::vector<int>{8, 4});
  CHECK(d.components == 2);
  REQUIRE(d.values.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(d.values[i] - v[i]) < 1e-6 * (1 + std::abs(v[i])));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_grid_dump(path), Error);
}
