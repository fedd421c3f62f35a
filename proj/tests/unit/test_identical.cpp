#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"

#include "bohm/error.hpp"
#include "bohm/identical.hpp"

using namespace bohm;

namespace {

const Grid& plane() {
  static const Grid g = make_grid(1, 2, {64, 64}, {20.0, 20.0}, Boundary::periodic);
  return g;
}

oracle::cplx packet1(double x, double c, double k) {
  return std::exp(-(x - c) * (x - c) / 4.0 + oracle::cplx{0, k * x});
}

// g(q1) h(q2) with distinct packets.
WaveFunction product(double c1, double k1, double c2, double k2) {
  return normalize(WaveFunction(plane(), 1, oracle::sample(plane(), [&](const std::vector<double>& q) {
                                  return packet1(q[0], c1, k1) * packet1(q[1], c2, k2);
                                }),
                                {1.0, 1.0}));
}

EvolutionRecord run(const WaveFunction& psi) {
  SolverConfig cfg;
  cfg.dt = 1e-2;
  return evolve(psi, cfg, 1.0, 1);
}

}  // namespace

TEST_CASE("antisymmetrizing a symmetric product vanishes") {
  const auto gg = product(0.0, 1.0, 0.0, 1.0);
  try {
    symmetrize(gg, -1, 0, 1);
    FAIL("expected zero norm");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::zero_norm);
  }
}

TEST_CASE("two-particle slater and symmetric forms") {
  const auto gh = product(-2.5, 1.5, 2.5, -1.5);
  for (int sign : {-1, 1}) {
    const auto psi = symmetrize(gh, sign, 0, 1);
    const auto swapped = swap_particles(psi, 0, 1);
    double err = 0.0;
    for (std::size_t p = 0; p < plane().size(); ++p) err = std::max(err, std::abs(swapped.amplitude(p) - double(sign) * psi.amplitude(p)));
    CHECK(err < 1e-12);
    CHECK(norm_squared(psi) == doctest::Approx(1.0).epsilon(1e-12));
    const auto rep = velocity_exchange_check(psi);
    CHECK(rep.symmetry == (sign < 0 ? Exchange::fermionic : Exchange::bosonic));
    CHECK(rep.max_wave_violation < 1e-12);
    CHECK(rep.max_velocity_violation < 1e-9);
  }
  // Negative control: the bare product has no exchange symmetry.
  const auto bad = velocity_exchange_check(gh);
  CHECK(bad.max_velocity_violation > 0.1);
}

TEST_CASE("unequal masses are not exchangeable") {
  const auto base = product(0.0, 0.0, 1.0, 0.0);
  const std::vector<oracle::cplx> amp(base.amplitudes().begin(), base.amplitudes().end());
  const WaveFunction psi(plane(), 1, amp, {1.0, 2.0});
  CHECK_FALSE(swappable(psi, 0, 1));
  CHECK_THROWS_AS(symmetrize(psi, 1, 0, 1), Error);
}

TEST_CASE("full symmetrizer over three particles") {
  const Grid g = make_grid(1, 3, {16, 16, 16}, {12.0, 12.0, 12.0}, Boundary::periodic);
  const auto psi0 = WaveFunction(g, 1, oracle::sample(g, [](const std::vector<double>& q) {
                                   return packet1(q[0], -2.0, 0.5) * packet1(q[1], 0.0, 0.0) * packet1(q[2], 2.0, -0.5);
                                 }),
                                 {1.0, 1.0, 1.0});
  for (int sign : {-1, 1}) {
    const auto psi = symmetrize_all(psi0, sign);
    for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
      const auto sw = swap_particles(psi, i, j);
      double err = 0.0;
      for (std::size_t p = 0; p < g.size(); ++p) err = std::max(err, std::abs(sw.amplitude(p) - double(sign) * psi.amplitude(p)));
      CHECK(err < 1e-12);
    }
    CHECK(velocity_exchange_check(psi).max_velocity_violation < 1e-9);
  }
}

TEST_CASE("spin bits travel with the particle") {
  const auto spatial = product(-1.0, 0.0, 1.0, 0.0);
  std::vector<oracle::cplx> amp(plane().size() * 4, 0.0);
  // Particle 0 up, particle 1 down: component index 0b01.
  for (std::size_t p = 0; p < plane().size(); ++p) amp[p * 4 + 1] = spatial.amplitude(p);
  const WaveFunction psi(plane(), 4, amp, {1.0, 1.0});
  const auto sw = swap_particles(psi, 0, 1);
  const auto swapped_spatial = swap_particles(spatial, 0, 1);
  for (std::size_t p = 0; p < plane().size(); p += 97) {
    CHECK(sw.amplitude(p, 2) == swapped_spatial.amplitude(p));
    CHECK(sw.amplitude(p, 1) == oracle::cplx{0.0});
  }
}

TEST_CASE("exchanged starts give exchanged paths") {
  const auto gh = product(-2.5, 1.5, 2.5, -1.5);
  for (int sign : {-1, 1}) {
    const auto rec = run(symmetrize(gh, sign, 0, 1));
    const double q0[] = {-2.2, 2.9};
    CHECK(flow_equivariance_check(rec, q0, 0, 1, 1e-2) < 1e-5);
  }
  // Diagonal start of a bosonic state is its own swap.
  const auto boson = run(symmetrize(gh, 1, 0, 1));
  const double diag[] = {0.4, 0.4};
  CHECK(flow_equivariance_check(boson, diag, 0, 1, 1e-2) < 1e-12);
  // Negative control.
  const auto plain = run(gh);
  const double q0[] = {-2.2, 2.9};
  CHECK(flow_equivariance_check(plain, q0, 0, 1, 1e-2) > 0.1);
}

TEST_CASE("fermion pairs never meet") {
  const auto rec = run(symmetrize(product(-2.5, 1.5, 2.5, -1.5), -1, 0, 1));
  const auto q0 = sample_initial(rec.snapshot(0), 300, 2);
  const auto ens = propagate_ensemble(rec, q0, 1e-2);
  CHECK(min_pair_separation(ens, 1) > 0.0);
}

TEST_CASE("unordered view is a canonical representative") {
  Rng rng(31);
  for (int n = 2; n <= 4; ++n) {
    for (int d = 1; d <= 3; ++d) {
      std::vector<double> q(static_cast<std::size_t>(n * d));
      for (auto& x : q) x = rng.normal();
      const auto ref = unordered_view(q, d);
      CHECK(unordered_view(ref.q, d).q == ref.q);
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      int count = 0;
      do {
        std::vector<double> p(q.size());
        for (int b = 0; b < n; ++b)
          for (int a = 0; a < d; ++a) p[static_cast<std::size_t>(b * d + a)] = q[static_cast<std::size_t>(perm[static_cast<std::size_t>(b)] * d + a)];
        CHECK(unordered_view(p, d).q == ref.q);
        ++count;
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(count == std::tgamma(n + 1));
    }
  }
  const double sorted[] = {1.0, 2.0};
  CHECK(unordered_view(sorted, 1).q == std::vector<double>{1.0, 2.0});
  const double reversed[] = {2.0, 1.0};
  const auto v = unordered_view(reversed, 1);
  CHECK(v.q == std::vector<double>{1.0, 2.0});
  CHECK(v.order == std::vector<int>{1, 0});
  const double same[] = {0.5, 0.5};
  CHECK(unordered_view(same, 1).coincident);
}
