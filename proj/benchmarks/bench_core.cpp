#include <benchmark/benchmark.h>

#include <vector>

#include "bohm/eulerian.hpp"
#include "bohm/guidance.hpp"
#include "bohm/measurement.hpp"
#include "bohm/qtm.hpp"
#include "bohm/random.hpp"
#include "bohm/trajectory.hpp"

namespace {

bohm::WaveFunction packet_1d(int points) {
  const auto g = bohm::make_grid(1, 1, {points}, {40.0}, bohm::Boundary::periodic);
  return bohm::gaussian_packet(g, std::vector{0.0}, std::vector{1.0}, std::vector{1.0});
}

void split_step_1d(benchmark::State& state) {
  const auto psi = packet_1d(static_cast<int>(state.range(0)));
  bohm::SolverConfig sc;
  sc.potential = bohm::PotentialSpec::harmonic({1.0}, {1.0});
  bohm::Propagator prop(psi.grid(), 1, psi.masses(), 1.0, sc);
  std::vector<bohm::cplx> a(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto _ : state) {
    prop.step(a, 1e-3);
    benchmark::DoNotOptimize(a.data());
  }
}
BENCHMARK(split_step_1d)->Arg(256)->Arg(1024)->Arg(4096);

void split_step_2d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = bohm::make_grid(1, 2, {n, n}, {20.0, 20.0}, bohm::Boundary::periodic);
  const auto psi = bohm::gaussian_packet(g, std::vector{-2.0, 2.0}, std::vector{1.0, 1.0}, std::vector{1.0, -1.0});
  bohm::Propagator prop(g, 1, psi.masses(), 1.0, {});
  std::vector<bohm::cplx> a(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto _ : state) {
    prop.step(a, 1e-3);
    benchmark::DoNotOptimize(a.data());
  }
}
BENCHMARK(split_step_2d)->Arg(64)->Arg(128)->Arg(256);

void velocity_probe(benchmark::State& state) {
  const auto psi = packet_1d(512);
  const auto interp = state.range(0) ? bohm::Interpolation::spectral : bohm::Interpolation::trilinear;
  const bohm::VelocityProbe probe(psi, interp);
  bohm::Rng rng(1);
  std::vector<double> q(1024);
  for (double& x : q) x = 4.0 * rng.normal();
  double v = 0.0;
  for (auto _ : state) {
    for (double& x : q) probe.velocity_at(std::span(&x, 1), std::span(&v, 1));
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(q.size()));
}
BENCHMARK(velocity_probe)->Arg(0)->Arg(1);

void ensemble_step(benchmark::State& state) {
  const auto psi = packet_1d(512);
  bohm::SolverConfig sc;
  sc.dt = 1e-2;
  const auto rec = bohm::evolve(psi, sc, 0.1, 1);
  const auto q0 = bohm::sample_initial(psi, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(bohm::propagate_ensemble(rec, q0, 1e-2).size());
  state.SetItemsProcessed(state.iterations() * state.range(0) * 10);
}
BENCHMARK(ensemble_step)->Arg(1000)->Arg(10000);

void kde(benchmark::State& state) {
  const auto g = bohm::make_grid(1, 1, {256}, {20.0}, bohm::Boundary::periodic);
  bohm::Rng rng(2);
  std::vector<double> pts(static_cast<std::size_t>(state.range(0)));
  for (double& x : pts) x = rng.normal();
  const double h = bohm::default_bandwidth(pts, 1);
  for (auto _ : state) benchmark::DoNotOptimize(bohm::estimate_density(pts, h, g).values.data());
}
BENCHMARK(kde)->Arg(1000)->Arg(4000)->Arg(16000);

void qtm_step(benchmark::State& state) {
  const auto g = bohm::make_grid(1, 1, {256}, {20.0}, bohm::Boundary::periodic);
  const auto psi = bohm::gaussian_packet(g, std::vector{0.0}, std::vector{1.0}, std::vector{1.0});
  auto s = bohm::qtm_init(psi, static_cast<std::size_t>(state.range(0)), 4);
  const auto v = bohm::PotentialSpec::zero();
  for (auto _ : state) s = bohm::qtm_step(s, v, 1e-3, g);
}
BENCHMARK(qtm_step)->Arg(4000);

void expm(benchmark::State& state) {
  bohm::Rng rng(5);
  const auto model = bohm::random_model(rng, static_cast<int>(state.range(0)));
  const bohm::Matrix a = bohm::Matrix(model.hamiltonian * bohm::cplx{0.0, -model.duration});
  for (auto _ : state) benchmark::DoNotOptimize(bohm::expm(a).data());
}
BENCHMARK(expm)->Arg(16)->Arg(64);

void povm_extraction(benchmark::State& state) {
  bohm::Rng rng(6);
  const auto model = bohm::random_model(rng, 64);
  for (auto _ : state) benchmark::DoNotOptimize(bohm::extract_povm(model).elements.size());
}
BENCHMARK(povm_extraction);

}  // namespace

BENCHMARK_MAIN();
