#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "bohm/error.hpp"
#include "bohm/eulerian.hpp"
#include "bohm/polar.hpp"

using namespace bohm;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

WaveFunction ring(int m, int points = 64, double hbar = 1.0) {
  const Grid g = make_grid(1, 1, {points}, {kTwoPi}, Boundary::periodic);
  return WaveFunction(g, 1, oracle::sample(g, [&](const std::vector<double>& q) {
                        return std::exp(oracle::cplx{0, m * q[0]}) / std::sqrt(kTwoPi);
                      }),
                      {1.0}, hbar);
}

}  // namespace

TEST_CASE("positive real states have zero phase") {
  const Grid g = make_grid(1, 2, {32, 32}, {10.0, 10.0}, Boundary::periodic);
  const double c[] = {0.5, -0.5}, s[] = {0.8, 3.0}, k[] = {0.0, 0.0};
  const auto psi = gaussian_packet(g, c, s, k);
  const auto pd = polar_decompose(psi, g.size() / 2 + 16);
  CHECK(pd.phase.branch_jumps.empty());
  for (std::size_t p = 0; p < g.size(); ++p)
    if (pd.phase.s.valid(p)) CHECK(std::abs(pd.phase.s.values[p]) < 1e-14);
  const auto loop = axis_loop(g, 1, g.size() / 2 + 16);
  CHECK(winding_number(pd.phase, loop).number == 0);
}

TEST_CASE("plane wave phase is linear away from the seam") {
  const Grid g = make_grid(1, 1, {64}, {kTwoPi}, Boundary::periodic);
  const double hbar = 0.7;
  const auto psi = WaveFunction(g, 1, oracle::sample(g, [](const std::vector<double>& q) {
                                  return std::exp(oracle::cplx{0, 3.0 * q[0]});
                                }),
                                {1.0}, hbar);
  const std::size_t anchor = 10;
  const auto pd = polar_decompose(psi, anchor);
  const double x0 = g.point(anchor)[0];
  const double base = pd.phase.s.values[anchor];
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double expect = hbar * 3.0 * (g.point(p)[0] - x0);
    const double diff = pd.phase.s.values[p] - base - expect;
    const double turns = diff / (kTwoPi * hbar);
    CHECK(std::abs(turns - std::round(turns)) < 1e-9);
  }
  CHECK(l2_distance(recompose(pd, psi), psi) < 1e-12);
}

TEST_CASE("ring states show one quantized jump and wind m times") {
  for (int m : {-1, 1, 2, 5}) {
    const auto psi = ring(m, 64, 1.3);
    const auto pd = polar_decompose(psi, 0);
    REQUIRE(pd.phase.branch_jumps.size() == 1);
    const auto& j = pd.phase.branch_jumps.front();
    CHECK(j.multiple == m);
    CHECK(j.quantization_error < 1e-6);
    const auto w = winding_number(pd.phase, axis_loop(psi.grid(), 0, 0));
    CHECK(w.number == m);
    CHECK(w.residue < 1e-9);
  }
}

TEST_CASE("winding on a vortex in two dimensions") {
  const Grid g = make_grid(1, 2, {64, 64}, {12.0, 12.0}, Boundary::periodic);
  const auto psi = normalize(WaveFunction(g, 1, oracle::sample(g, [](const std::vector<double>& q) {
                                            const double r2 = q[0] * q[0] + q[1] * q[1];
                                            return oracle::cplx{q[0], -q[1]} * std::exp(-r2 / 4.0);
                                          }),
                                          {1.0, 1.0}));
  const auto anchor = g.flat_index(std::vector<int>{40, 32});
  const auto pd = polar_decompose(psi, anchor, 1e-6);
  // Square loop of lattice points around the origin.
  std::vector<std::size_t> loop;
  for (int i = 24; i < 40; ++i) loop.push_back(g.flat_index(std::vector<int>{i, 24}));
  for (int j = 24; j < 40; ++j) loop.push_back(g.flat_index(std::vector<int>{40, j}));
  for (int i = 40; i > 24; --i) loop.push_back(g.flat_index(std::vector<int>{i, 40}));
  for (int j = 40; j > 24; --j) loop.push_back(g.flat_index(std::vector<int>{24, j}));
  // Conjugate vortex x - iy winds once clockwise.
  CHECK(winding_number(pd.phase, loop).number == -1);
  for (const auto& j : pd.phase.branch_jumps) CHECK(j.quantization_error < 1e-6);
}

TEST_CASE("decomposition errors") {
  const auto psi = ring(1);
  CHECK_THROWS_AS(polar_decompose(psi, 1000), Error);
  const Grid g = make_grid(1, 1, {64}, {20.0}, Boundary::periodic);
  const double c[] = {0.0}, s[] = {0.5}, k[] = {0.0};
  const auto narrow = gaussian_packet(g, c, s, k);
  try {
    polar_decompose(narrow, 0);
    FAIL("anchor in the masked region");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  try {
    hamilton_jacobi_residuals(narrow, narrow, PotentialSpec::zero(), 0.1);
    FAIL("mostly masked grid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_input);
  }
}

TEST_CASE("stationary and plane-wave residuals") {
  const auto psi = ring(2);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  const auto b = step_split_spectral(psi, PotentialSpec::zero(), 1e-3);
  const auto r = hamilton_jacobi_residuals(psi, b, PotentialSpec::zero(), 1e-3);
  CHECK(r.continuity < 1e-8);
  CHECK(r.hamilton_jacobi < 1e-8);
  CHECK(r.energy == doctest::Approx(2.0).epsilon(1e-9));

  // Tight box: the residuals refuse grids that are mostly node region.
  const Grid g = make_grid(1, 1, {256}, {12.0}, Boundary::periodic);
  const double c[] = {0.0}, s[] = {std::sqrt(0.5)}, k[] = {0.0};
  const auto ground = gaussian_packet(g, c, s, k);
  const auto v = PotentialSpec::harmonic({1.0}, {1.0});
  const auto gb = step_split_spectral(ground, v, 1e-4);
  const auto rg = hamilton_jacobi_residuals(ground, gb, v, 1e-4);
  CHECK(rg.continuity < 1e-8);
  CHECK(rg.hamilton_jacobi < 1e-6);
  CHECK(rg.energy == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("free gaussian residuals are second order in dt") {
  const Grid g = make_grid(1, 1, {256}, {19.0}, Boundary::periodic);
  const auto psi = WaveFunction(g, 1, oracle::sample(g, [](const std::vector<double>& q) {
                                  return oracle::free_gaussian(q[0], 0.3, 0.0, 1.0, 1.0);
                                }),
                                {1.0});
  auto res = [&](double dt) {
    return hamilton_jacobi_residuals(psi, step_split_spectral(psi, PotentialSpec::zero(), dt), PotentialSpec::zero(), dt);
  };
  const auto r1 = res(2e-3), r2 = res(1e-3);
  MESSAGE("continuity " << r1.continuity / r2.continuity << " hj " << r1.hamilton_jacobi / r2.hamilton_jacobi);
  CHECK(r1.continuity / r2.continuity == doctest::Approx(4.0).epsilon(0.1));
  CHECK(r1.hamilton_jacobi / r2.hamilton_jacobi == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("jump ledger lists each jump") {
  const auto pd = polar_decompose(ring(2), 0);
  const auto path = std::filesystem::temp_directory_path() / "bohm_unit_jumps.json";
  write_jump_ledger(path, pd.phase);
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"multiple\": 2") != std::string::npos);
  std::filesystem::remove(path);
}
