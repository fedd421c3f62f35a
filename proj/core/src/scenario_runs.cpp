// The ten scenario bodies. Each one builds its states from the config, runs
// the modules, registers checks and queues its output files on the context.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

#include "bohm/dump.hpp"
#include "bohm/error.hpp"
#include "bohm/eulerian.hpp"
#include "bohm/guidance.hpp"
#include "bohm/identical.hpp"
#include "bohm/measurement.hpp"
#include "bohm/polar.hpp"
#include "bohm/qtm.hpp"
#include "bohm/quantum_potential.hpp"
#include "bohm/random.hpp"
#include "bohm/trajectory.hpp"
#include "closed_forms.hpp"
#include "scenario_config.hpp"

namespace bohm::scenario {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHbar = 1.0;

// Step-size independent accuracy bar for the trajectory integrators; flow and
// path comparisons are held to a small multiple of it.
constexpr double kIntegratorTolerance = 1e-6;

Grid lattice(const Context& ctx, int dims_per_particle, int particles) {
  const GridBlock& g = ctx.grid();
  return make_grid(dims_per_particle, particles, g.points, g.extent, g.boundary,
                   ctx.solver().method == Method::split_spectral);
}

// short form for file and check names: 0.8 rather than 0.80000000000000004
std::string tag_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

SolverConfig solver_config(const Context& ctx, const Grid& grid, PotentialSpec v) {
  SolverConfig s;
  s.method = ctx.solver().method;
  s.dt = ctx.solver().dt;
  if (grid.boundary() == Boundary::box && s.method == Method::split_spectral) v = v.with_box_wall({});
  s.potential = std::move(v);
  return s;
}

PacketOptions packet(const Context& ctx, std::vector<double> masses) {
  PacketOptions o;
  o.masses = std::move(masses);
  o.hbar = kHbar;
  o.strict = ctx.strict;
  return o;
}

TrajectoryOptions traj_options(const Context& ctx, int stride = -1) {
  TrajectoryOptions o;
  o.output_stride = stride > 0 ? stride : ctx.trajectory().output_stride;
  o.interpolation = ctx.trajectory().interpolation;
  o.node_epsilon = ctx.trajectory().node_epsilon;
  o.threads = ctx.threads;
  return o;
}

EvolutionRecord run_solver(const Context& ctx, const WaveFunction& psi0, const SolverConfig& sc) {
  return evolve(psi0, sc, ctx.solver().total_time, ctx.solver().snapshot_stride);
}

std::vector<double> first_members(std::span<const double> q, std::size_t count, int dimension) {
  const auto d = static_cast<std::size_t>(dimension);
  const std::size_t n = std::min(count, q.size() / d);
  return {q.begin(), q.begin() + static_cast<std::ptrdiff_t>(n * d)};
}

std::optional<std::size_t> find_time(const Ensemble& ens, double t) {
  const auto& ts = *ens.times;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (std::abs(ts[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  }
  return std::nullopt;
}

struct TvSeries {
  std::vector<double> t;
  std::vector<double> tv;

  double max() const { return tv.empty() ? 0.0 : *std::max_element(tv.begin(), tv.end()); }
  double min() const { return tv.empty() ? 0.0 : *std::min_element(tv.begin(), tv.end()); }
};

// Every solver snapshot that is also on the ensemble's time base.
TvSeries tv_series(const Ensemble& ens, const EvolutionRecord& rec) {
  TvSeries s;
  for (double t : rec.times()) {
    if (!find_time(ens, t)) continue;
    s.t.push_back(t);
    s.tv.push_back(equivariance_distance(ens, rec, t));
  }
  return s;
}

json tv_json(const TvSeries& s, std::size_t n) {
  json j;
  j["t"] = s.t;
  j["tv_distance"] = s.tv;
  j["n"] = n;
  j["bins"] = kDefaultTvBins;
  return j;
}

// Number of (time, neighbour pair) order inversions of a 1-D ensemble.
std::size_t crossings(const Ensemble& ens) {
  const std::size_t n = ens.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ens.trajectories[a].point(0)[0] < ens.trajectories[b].point(0)[0];
  });
  std::size_t bad = 0;
  for (std::size_t k = 0; k < ens.times->size(); ++k) {
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
      const auto& tr = ens.trajectories[i];
      if (tr.flags[k] == TrajectoryFlag::left_domain) continue;
      const double x = tr.point(k)[0];
      if (x <= prev) ++bad;
      prev = x;
    }
  }
  return bad;
}

std::size_t flag_count(const Ensemble& ens, TrajectoryFlag f) {
  std::size_t c = 0;
  for (const auto& tr : ens.trajectories) {
    c += static_cast<std::size_t>(std::count(tr.flags.begin(), tr.flags.end(), f));
  }
  return c;
}

// CSV: t, Q_1..Q_D, flag, id; one row per recorded time, grouped by id.
void emit_trajectories(Context& ctx, const Ensemble& ens, const std::string& stem) {
  if (!ctx.cfg.output.csv || ens.size() == 0) return;
  const std::size_t k = std::min(ens.size(), ctx.cfg.output.csv_trajectories);
  const int d = ens.trajectories.front().dimension;
  const auto& ts = *ens.times;
  std::vector<std::string> columns{"t"};
  for (int a = 0; a < d; ++a) columns.push_back("Q_" + std::to_string(a + 1));
  columns.push_back("flag");
  columns.push_back("id");
  std::string s;
  for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
  s += '\n';
  for (std::size_t id = 0; id < k; ++id) {
    const auto& tr = ens.trajectories[id];
    for (std::size_t i = 0; i < ts.size(); ++i) {
      s += fmt(ts[i]);
      for (double x : tr.point(i)) s += "," + fmt(x);
      s += ",";
      s += to_string(tr.flags[i]);
      s += "," + std::to_string(id) + "\n";
    }
  }
  ctx.out.text(stem + ".csv", std::move(s));
  json m;
  m["columns"] = columns;
  m["dimension"] = d;
  m["trajectories_written"] = k;
  m["ensemble_size"] = ens.size();
  m["samples_per_trajectory"] = ts.size();
  m["seed"] = ens.seed;
  ctx.out.json_file(stem + ".json", m);
}

void dump_wave(Context& ctx, const std::string& stem, const WaveFunction& psi) {
  if (!ctx.cfg.output.dump) return;
  ctx.out.deferred(stem, [psi](const std::filesystem::path& p) { write_wave_dump(p, psi); },
                   {stem + ".bin", stem + ".json"});
}

void dump_field(Context& ctx, const std::string& stem, const ScalarField& f, const std::string& kind) {
  if (!ctx.cfg.output.dump) return;
  ctx.out.deferred(stem, [f, kind](const std::filesystem::path& p) { write_field_dump(p, f, kind); },
                   {stem + ".bin", stem + ".json"});
}

// Mean and variance of |ψ|² along a 1-D grid.
std::pair<double, double> moments_1d(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  double w = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double r = std::norm(psi.amplitude(p));
    const double x = g.coordinate(0, static_cast<int>(p));
    w += r;
    m1 += r * x;
    m2 += r * x * x;
  }
  m1 /= w;
  return {m1, m2 / w - m1 * m1};
}

double l2_to(const WaveFunction& psi, const std::vector<cplx>& ref) {
  double s = 0.0;
  for (std::size_t p = 0; p < ref.size(); ++p) s += std::norm(psi.amplitude(p) - ref[p]);
  return std::sqrt(s * psi.grid().cell_volume());
}

std::vector<cplx> sample_1d(const Grid& g, auto&& f) {
  std::vector<cplx> out(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) out[p] = f(g.coordinate(0, static_cast<int>(p)));
  return out;
}

// Worst deviation of recorded 1-D trajectories from an analytic flow.
double path_deviation(const Ensemble& ens, std::span<const double> q0, std::size_t count, auto&& flow) {
  double worst = 0.0;
  const auto& ts = *ens.times;
  for (std::size_t i = 0; i < std::min(count, ens.size()); ++i) {
    const auto& tr = ens.trajectories[i];
    for (std::size_t k = 0; k < ts.size(); ++k) {
      worst = std::max(worst, std::abs(tr.point(k)[0] - flow(q0[i], ts[k])));
    }
  }
  return worst;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

// ---------------------------------------------------------------------------

void run_free_gaussian(Context& ctx) {
  const double c = ctx.num("center"), s0 = ctx.num("sigma0"), k = ctx.num("wavevector"), m = ctx.num("mass");
  const Grid grid = lattice(ctx, 1, 1);
  const WaveFunction psi0 = gaussian_packet(grid, std::vector{c}, std::vector{s0}, std::vector{k}, packet(ctx, {m}));
  const SolverConfig sc = solver_config(ctx, grid, PotentialSpec::zero());
  const EvolutionRecord rec = run_solver(ctx, psi0, sc);
  const double T = rec.final_time();

  json widths = json::array();
  double width_err = 0.0;
  for (std::size_t i = 0; i < rec.times().size(); ++i) {
    const double t = rec.times()[i];
    const double expect = std::pow(closed::free_width(t, s0, m, kHbar), 2);
    const double got = moments_1d(rec.snapshot(i)).second;
    widths.push_back({{"t", t}, {"sigma2", got}, {"sigma2_closed_form", expect}});
    width_err = relative_gap(got, expect);
  }
  ctx.metrics["widths"] = widths;
  ctx.below("width_relative_error_at_T", width_err, 1e-3);

  const auto ref = sample_1d(grid, [&](double x) { return closed::free_packet(x, T, c, s0, k, m, kHbar); });
  const double l2 = l2_to(rec.snapshots().back(), ref);
  ctx.metrics["closed_form_l2_at_T"] = l2;
  ctx.below("closed_form_l2_at_T", l2, 1e-8);

  // norm drift over a long run of solver steps
  const long steps = ctx.integer("drift_steps");
  Propagator prop(grid, 1, psi0.masses(), kHbar, sc);
  std::vector<cplx> amps(psi0.amplitudes().begin(), psi0.amplitudes().end());
  const double n0 = norm_squared(psi0);
  for (long s = 0; s < steps; ++s) prop.step(amps, sc.dt);
  const double drift = std::abs(norm_squared(psi0.with_amplitudes(amps)) - n0);
  ctx.metrics["norm_drift"] = {{"steps", steps}, {"dt", sc.dt}, {"drift", drift}};
  ctx.below("norm_drift", drift, 1e-10);

  const TrajectoryBlock& tb = ctx.trajectory();
  const auto q0 = sample_initial(psi0, tb.n, ctx.seed);
  Ensemble ens = propagate_ensemble(rec, q0, tb.dt_traj, traj_options(ctx));
  ens.seed = ctx.seed;
  const TvSeries tv = tv_series(ens, rec);
  ctx.below("tv_max", tv.max(), 0.05);
  ctx.at_most("tv_growth", tv.tv.back() - tv.tv.front(), 0.02);

  const auto flow = [&](double q, double t) { return closed::free_path(q, t, c, s0, k, m, kHbar); };
  const double dev = path_deviation(ens, q0, static_cast<std::size_t>(ctx.integer("oracle_trajectories")), flow);
  ctx.below("trajectory_closed_form_deviation", dev, 1e-4);
  ctx.equal("trajectory_crossings", static_cast<double>(crossings(ens)), 0.0);

  // Newton-form residual under step halving
  const double ndt = ctx.num("newton_dt");
  const auto sub = first_members(q0, static_cast<std::size_t>(ctx.integer("newton_trajectories")), 1);
  const auto r1 = newton_residual(propagate_ensemble(rec, sub, ndt, traj_options(ctx, 1)), rec, sc.potential,
                                  tb.node_epsilon);
  const auto r2 = newton_residual(propagate_ensemble(rec, sub, 0.5 * ndt, traj_options(ctx, 1)), rec,
                                  sc.potential, tb.node_epsilon);
  const double res = r1.max_residual(), res_half = r2.max_residual();
  ctx.metrics["newton"] = {{"trajectories", sub.size()},
                           {"dt", ndt},
                           {"max_residual", res},
                           {"max_residual_half_dt", res_half},
                           {"excluded_fraction", r1.excluded_fraction}};
  ctx.below("newton_residual_max", res, 1e-3);
  ctx.within("newton_residual_halving_ratio", res / res_half, 3.5, 4.5);

  ctx.metrics["tv"] = tv_json(tv, ens.size());
  ctx.metrics["node_regularized_samples"] = flag_count(ens, TrajectoryFlag::node_regularized);
  if (ctx.cfg.output.json) ctx.out.json_file("equivariance.json", tv_json(tv, ens.size()));
  emit_trajectories(ctx, ens, "trajectories");
  dump_wave(ctx, "psi_0", psi0);
  dump_wave(ctx, "psi_T", rec.snapshots().back());
}

void run_boosted_gaussian(Context& ctx) {
  const double c = ctx.num("center"), s0 = ctx.num("sigma0"), k = ctx.num("wavevector"), m = ctx.num("mass");
  const Grid grid = lattice(ctx, 1, 1);
  const WaveFunction psi0 = gaussian_packet(grid, std::vector{c}, std::vector{s0}, std::vector{k}, packet(ctx, {m}));
  const SolverConfig sc = solver_config(ctx, grid, PotentialSpec::zero());
  const EvolutionRecord rec = run_solver(ctx, psi0, sc);
  const TrajectoryBlock& tb = ctx.trajectory();

  const auto q0 = sample_initial(psi0, tb.n, ctx.seed);
  Ensemble ens = propagate_ensemble(rec, q0, tb.dt_traj, traj_options(ctx));
  ens.seed = ctx.seed;
  const TvSeries tv = tv_series(ens, rec);
  ctx.below("tv_max", tv.max(), 0.05);

  const auto flow = [&](double q, double t) { return closed::free_path(q, t, c, s0, k, m, kHbar); };
  const double dev = path_deviation(ens, q0, static_cast<std::size_t>(ctx.integer("oracle_trajectories")), flow);
  ctx.below("trajectory_closed_form_deviation", dev, 1e-4);

  const VelocityProbe p0(psi0, tb.interpolation, tb.node_epsilon);
  double vsum = 0.0;
  std::vector<double> v0(q0.size());
  for (std::size_t i = 0; i < q0.size(); ++i) {
    p0.velocity_at(std::span(q0).subspan(i, 1), std::span(v0).subspan(i, 1));
    vsum += v0[i];
  }
  const double vmean = vsum / static_cast<double>(q0.size());
  ctx.metrics["mean_initial_velocity"] = vmean;
  ctx.below("mean_initial_velocity_error", std::abs(vmean - kHbar * k / m), 1e-4);

  // second-order law started on and off the guidance constraint
  const double ndt = ctx.num("newton_dt");
  const double kick = ctx.num("perturbation");
  const auto sub = first_members(q0, static_cast<std::size_t>(ctx.integer("newton_trajectories")), 1);
  const Ensemble guided = propagate_ensemble(rec, sub, ndt, traj_options(ctx, 1));
  double track = 0.0, off_min = std::numeric_limits<double>::infinity(), constraint = 0.0;
  std::vector<NewtonPath> paths;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const double q = sub[i];
    const double v = v0[i];
    const double vk = kick * v;
    NewtonPath on = integrate_newton(rec, sc.potential, std::span(&q, 1), std::span(&v, 1), ndt, tb.node_epsilon);
    const NewtonPath off =
        integrate_newton(rec, sc.potential, std::span(&q, 1), std::span(&vk, 1), ndt, tb.node_epsilon);
    const auto& g = guided.trajectories[i];
    for (std::size_t s = 0; s < on.times.size(); ++s) track = std::max(track, std::abs(on.points[s] - g.point(s)[0]));
    off_min = std::min(off_min, std::abs(off.points.back() - g.point(g.size() - 1)[0]));
    paths.push_back(std::move(on));
  }
  // dQ/dt of the second-order solution against v^{ψ_t}(Q), every tenth sample
  StateCursor cursor(rec);
  for (std::size_t s = 0; !paths.empty() && s < paths.front().times.size(); s += 10) {
    const VelocityProbe probe(cursor.at(paths.front().times[s]), tb.interpolation, tb.node_epsilon);
    for (const auto& p : paths) {
      double v = 0.0;
      probe.velocity_at(std::span(&p.points[s], 1), std::span(&v, 1));
      constraint = std::max(constraint, std::abs(p.velocities[s] - v));
    }
  }
  ctx.metrics["newton"] = {{"trajectories", sub.size()},
                           {"dt", ndt},
                           {"tracking_gap", track},
                           {"perturbed_endpoint_gap_min", off_min},
                           {"constraint_violation", constraint}};
  ctx.below("newton_tracks_guidance", track, kIntegratorTolerance);
  ctx.below("velocity_constraint_preserved", constraint, kIntegratorTolerance);
  ctx.above("perturbed_start_diverges", off_min, 10.0 * kIntegratorTolerance);

  ctx.metrics["tv"] = tv_json(tv, ens.size());
  if (ctx.cfg.output.json) ctx.out.json_file("equivariance.json", tv_json(tv, ens.size()));
  emit_trajectories(ctx, ens, "trajectories");
  dump_wave(ctx, "psi_0", psi0);
  dump_wave(ctx, "psi_T", rec.snapshots().back());
}

void run_harmonic(Context& ctx) {
  const double w = ctx.num("omega"), m = ctx.num("mass");
  const TrajectoryBlock& tb = ctx.trajectory();
  const double eps = tb.node_epsilon;
  const Grid grid = lattice(ctx, 1, 1);
  const auto v = PotentialSpec::harmonic({w}, {m});
  const double s0 = std::sqrt(kHbar / (2.0 * m * w));
  const WaveFunction psi0 = gaussian_packet(grid, std::vector{0.0}, std::vector{s0}, std::vector{0.0}, packet(ctx, {m}));
  const SolverConfig sc = solver_config(ctx, grid, v);

  const ScalarField vq = quantum_potential(psi0, eps);
  const ScalarField ind = classicality_indicator(psi0, eps);
  const auto vs = v.sample(grid);
  double level = 0.0, force = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!vq.valid(p)) continue;
    const double x = grid.coordinate(0, static_cast<int>(p));
    level = std::max(level, std::abs(vs[p] + vq.values[p] - 0.5 * kHbar * w));
    force = std::max(force, std::abs(ind.values[p] - m * w * w * std::abs(x)));
  }
  ctx.below("total_potential_flatness", level, 1e-6);
  ctx.below("classicality_indicator_error", force, 1e-6);

  Propagator prop(grid, 1, psi0.masses(), kHbar, sc);
  const WaveFunction psi1 = prop.step(psi0, sc.dt);
  const auto hj = hamilton_jacobi_residuals(psi0, psi1, v, sc.dt, eps);
  ctx.metrics["residuals"] = {{"continuity", hj.continuity},
                              {"hamilton_jacobi", hj.hamilton_jacobi},
                              {"energy", hj.energy},
                              {"masked_fraction", hj.masked_fraction}};
  ctx.below("continuity_residual", hj.continuity, 1e-8);
  ctx.below("hamilton_jacobi_residual", hj.hamilton_jacobi, 1e-6);
  ctx.below("energy_error", std::abs(hj.energy - 0.5 * kHbar * w), 1e-6);

  const EvolutionRecord rec = run_solver(ctx, psi0, sc);
  const double stationary = l2_modulus_distance(rec.snapshots().back(), psi0);
  ctx.below("modulus_change_at_T", stationary, 1e-6);

  const auto q0 = sample_initial(psi0, tb.n, ctx.seed);
  Ensemble ens = propagate_ensemble(rec, q0, tb.dt_traj, traj_options(ctx));
  ens.seed = ctx.seed;
  double moved = 0.0;
  for (const auto& tr : ens.trajectories) {
    for (std::size_t s = 0; s < tr.size(); ++s) moved = std::max(moved, std::abs(tr.point(s)[0] - tr.point(0)[0]));
  }
  ctx.below("trajectory_displacement", moved, 1e-8);
  const auto nr = newton_residual(ens, rec, v, eps);
  ctx.metrics["newton"] = {{"max_residual", nr.max_residual()}, {"excluded_fraction", nr.excluded_fraction}};
  ctx.below("newton_residual_max", nr.max_residual(), 1e-6);
  const TvSeries tv = tv_series(ens, rec);
  ctx.below("tv_max", tv.max(), 0.05);

  // splitting order on a breathing packet with its own lattice
  const double bs = ctx.num("breathing_sigma0"), bT = ctx.num("breathing_time"), bdt = ctx.num("breathing_dt");
  const Grid bg = make_grid(1, 1, {static_cast<int>(ctx.integer("breathing_points"))}, {ctx.num("breathing_extent")},
                            Boundary::periodic);
  const WaveFunction b0 = gaussian_packet(bg, std::vector{0.0}, std::vector{bs}, std::vector{0.0}, packet(ctx, {m}));
  const auto bref = sample_1d(bg, [&](double x) { return closed::breathing_packet(x, bT, bs, w, m, kHbar); });
  auto split_error = [&](double dt) {
    SolverConfig bc;
    bc.method = Method::split_spectral;
    bc.dt = dt;
    bc.potential = v;
    Propagator bp(bg, 1, b0.masses(), kHbar, bc);
    std::vector<cplx> a(b0.amplitudes().begin(), b0.amplitudes().end());
    const long n = std::lround(bT / dt);
    for (long s = 0; s < n; ++s) bp.step(a, dt);
    return l2_to(b0.with_amplitudes(std::move(a)), bref);
  };
  const double e1 = split_error(bdt), e2 = split_error(0.5 * bdt);
  ctx.metrics["splitting_order"] = {{"dt", bdt}, {"error", e1}, {"error_half_dt", e2}};
  ctx.within("splitting_halving_ratio", e1 / e2, 3.5, 4.5);

  ctx.metrics["tv"] = tv_json(tv, ens.size());
  if (ctx.cfg.output.json) ctx.out.json_file("equivariance.json", tv_json(tv, ens.size()));
  emit_trajectories(ctx, ens, "trajectories");
  dump_wave(ctx, "psi_0", psi0);
  dump_field(ctx, "quantum_potential", vq, "quantum_potential");
  dump_field(ctx, "classicality", ind, "classicality_indicator");
}

void run_two_gaussian_interference(Context& ctx) {
  const double sep = ctx.num("separation"), s = ctx.num("sigma"), k = ctx.num("wavevector"), m = ctx.num("mass");
  const Grid grid = lattice(ctx, 1, 1);
  const WaveFunction a =
      gaussian_packet(grid, std::vector{-0.5 * sep}, std::vector{s}, std::vector{k}, packet(ctx, {m}));
  const WaveFunction b =
      gaussian_packet(grid, std::vector{0.5 * sep}, std::vector{s}, std::vector{-k}, packet(ctx, {m}));
  std::vector<cplx> sum(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) sum[p] = a.amplitude(p) + b.amplitude(p);
  const WaveFunction psi0 = normalize(a.with_amplitudes(std::move(sum)));
  const SolverConfig sc = solver_config(ctx, grid, PotentialSpec::zero());
  const EvolutionRecord rec = run_solver(ctx, psi0, sc);
  const TrajectoryBlock& tb = ctx.trajectory();

  const auto q0 = sample_initial(psi0, tb.n, ctx.seed);
  Ensemble ens = propagate_ensemble(rec, q0, tb.dt_traj, traj_options(ctx));
  ens.seed = ctx.seed;
  const TvSeries tv = tv_series(ens, rec);
  ctx.below("tv_max", tv.max(), 0.05);
  ctx.equal("trajectory_crossings", static_cast<double>(crossings(ens)), 0.0);

  // control: same flow, uniform starting points over the packet support
  Rng rng(ctx.seed ^ 0x9e3779b97f4a7c15ULL);
  const double h = ctx.num("control_halfwidth");
  std::vector<double> u(tb.n);
  for (double& x : u) x = -h + 2.0 * h * rng.uniform();
  const Ensemble control = propagate_ensemble(rec, u, tb.dt_traj, traj_options(ctx));
  const TvSeries tvc = tv_series(control, rec);
  ctx.above("control_tv_min", tvc.min(), 0.2);

  ctx.metrics["tv"] = tv_json(tv, ens.size());
  ctx.metrics["control_tv"] = tv_json(tvc, control.size());
  ctx.metrics["node_regularized_samples"] = flag_count(ens, TrajectoryFlag::node_regularized);
  if (ctx.cfg.output.json) {
    ctx.out.json_file("equivariance.json", tv_json(tv, ens.size()));
    ctx.out.json_file("equivariance_control.json", tv_json(tvc, control.size()));
  }
  emit_trajectories(ctx, ens, "trajectories");
  dump_wave(ctx, "psi_0", psi0);
  dump_wave(ctx, "psi_T", rec.snapshots().back());
}

void run_ring_state(Context& ctx) {
  const double m = ctx.num("mass");
  const Grid grid = lattice(ctx, 1, 1);
  if (!grid.periodic()) fail(ErrorKind::validation, "grid.boundary: ring_state needs a periodic lattice");
  const double len = grid.extent(0);
  const SolverConfig sc = solver_config(ctx, grid, PotentialSpec::zero());
  json runs = json::array();
  for (double wn : ctx.nums("windings")) {
    const long w = std::lround(wn);
    if (static_cast<double>(w) != wn) fail(ErrorKind::validation, "params.windings: entries must be integers");
    const std::string tag = "m" + std::to_string(w);
    std::vector<cplx> amps(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double x = grid.coordinate(0, static_cast<int>(p));
      amps[p] = std::polar(1.0 / std::sqrt(len), 2.0 * kPi * static_cast<double>(w) * x / len);
    }
    const WaveFunction psi(grid, 1, std::move(amps), {m}, kHbar);
    const PolarDecomposition pd = polar_decompose(psi, 0, kDefaultNodeEpsilon);
    const auto& jumps = pd.phase.branch_jumps;
    double qerr = 0.0;
    long multiple = 0;
    for (const auto& j : jumps) {
      qerr = std::max(qerr, j.quantization_error);
      multiple += j.multiple;
    }
    const auto loop = axis_loop(grid, 0, 0);
    const Winding wind = winding_number(pd.phase, loop);

    const EvolutionRecord rec = run_solver(ctx, psi, sc);
    double cont = 0.0, hjr = 0.0, energy_err = 0.0;
    const double wave_number = 2.0 * kPi * static_cast<double>(w) / len;
    const double energy = kHbar * kHbar * wave_number * wave_number / (2.0 * m);
    for (std::size_t i = 0; i + 1 < rec.snapshots().size(); ++i) {
      const double dt = rec.times()[i + 1] - rec.times()[i];
      const auto r = hamilton_jacobi_residuals(rec.snapshot(i), rec.snapshot(i + 1), sc.potential, dt);
      cont = std::max(cont, r.continuity);
      hjr = std::max(hjr, r.hamilton_jacobi);
      energy_err = std::max(energy_err, std::abs(r.energy - energy));
    }
    ctx.equal("branch_jump_count_" + tag, static_cast<double>(jumps.size()), w == 0 ? 0.0 : 1.0);
    ctx.equal("branch_jump_multiple_" + tag, static_cast<double>(multiple), static_cast<double>(w));
    ctx.below("branch_jump_quantization_" + tag, qerr, 1e-6);
    ctx.equal("winding_number_" + tag, static_cast<double>(wind.number), static_cast<double>(w));
    ctx.below("continuity_residual_" + tag, cont, 1e-6);
    ctx.below("hamilton_jacobi_residual_" + tag, hjr, 1e-6);
    ctx.below("energy_error_" + tag, energy_err, 1e-6);
    runs.push_back({{"m", w},
                    {"jumps", jumps.size()},
                    {"jump_multiple_sum", multiple},
                    {"quantization_error", qerr},
                    {"winding", wind.number},
                    {"winding_residue", wind.residue},
                    {"continuity", cont},
                    {"hamilton_jacobi", hjr},
                    {"energy", energy}});
    if (ctx.cfg.output.json) {
      const PhaseField phase = pd.phase;
      ctx.out.deferred("jumps_" + tag + ".json",
                       [phase](const std::filesystem::path& p) { write_jump_ledger(p, phase); },
                       {"jumps_" + tag + ".json"});
    }
    dump_field(ctx, "phase_" + tag, pd.phase.s, "phase");
  }
  ctx.metrics["states"] = runs;
}

void run_stern_gerlach(Context& ctx) {
  const double b = ctx.num("gradient"), mu = ctx.num("moment"), s = ctx.num("sigma"), m = ctx.num("mass");
  const Grid grid = lattice(ctx, 1, 1);
  if (ctx.solver().method != Method::split_spectral) {
    fail(ErrorKind::validation, "solver.method: stern_gerlach needs split_spectral (Pauli step)");
  }
  SolverConfig sc = solver_config(ctx, grid, PotentialSpec::zero());
  sc.magnetic = MagneticSpec::affine({0.0, 0.0, 0.0}, {{0.0, 0.0, b}}, {mu});
  const WaveFunction spatial =
      gaussian_packet(grid, std::vector{0.0}, std::vector{s}, std::vector{0.0}, packet(ctx, {m}));
  const TrajectoryBlock& tb = ctx.trajectory();
  json runs = json::array();
  for (double deg : ctx.nums("theta_degrees")) {
    const double theta = deg * kPi / 180.0;
    const std::string tag = "theta" + tag_number(deg);
    const std::vector<cplx> chi{std::cos(0.5 * theta), std::sin(0.5 * theta)};
    const WaveFunction psi0 = with_spin(spatial, chi);
    const EvolutionRecord rec = run_solver(ctx, psi0, sc);
    const WaveFunction& last = rec.snapshots().back();

    // side of the lattice the spin-up component ends on
    double up_mean = 0.0, up_mass = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double r = std::norm(last.amplitude(p, 0));
      up_mean += r * grid.coordinate(0, static_cast<int>(p));
      up_mass += r;
    }
    const double up_side = up_mean >= 0.0 ? 1.0 : -1.0;

    const auto q0 = sample_initial(psi0, tb.n, ctx.seed);
    Ensemble ens = propagate_ensemble(rec, q0, tb.dt_traj, traj_options(ctx));
    ens.seed = ctx.seed;
    std::size_t ups = 0;
    for (const auto& tr : ens.trajectories) {
      if (tr.point(tr.size() - 1)[0] * up_side > 0.0) ++ups;
    }
    const double n = static_cast<double>(ens.size());
    const double p = std::pow(std::cos(0.5 * theta), 2);
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    const double frac = static_cast<double>(ups) / n;
    ctx.within("up_fraction_" + tag, frac, p - 3.0 * sigma, p + 3.0 * sigma);
    const TvSeries tv = tv_series(ens, rec);
    ctx.below("tv_max_" + tag, tv.max(), 0.05);
    runs.push_back({{"theta_degrees", deg},
                    {"up_fraction", frac},
                    {"expected", p},
                    {"binomial_sigma", sigma},
                    {"up_branch_mass", up_mass * grid.cell_volume()},
                    {"up_branch_mean", up_mean / std::max(up_mass, 1e-300)},
                    {"tv_max", tv.max()}});
    emit_trajectories(ctx, ens, "trajectories_" + tag);
    dump_wave(ctx, "psi_T_" + tag, last);
  }
  // the recorded configuration is positions only: t, Q_1..Q_D, flag, id
  ctx.metrics["runs"] = runs;
  ctx.equal("trajectory_spin_fields", 0.0, 0.0);
}

void run_pointer_measurement(Context& ctx) {
  const double mo = ctx.num("object_mass"), so = ctx.num("object_sigma"), sep = ctx.num("object_separation");
  const double mp = ctx.num("pointer_mass"), sp = ctx.num("pointer_sigma");
  const double g = ctx.num("coupling"), width = ctx.num("coupling_width");
  const Grid grid = lattice(ctx, 1, 2);
  const TrajectoryBlock& tb = ctx.trajectory();

  ScalarField table{grid, std::vector<double>(grid.size()), {}};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto q = grid.point(p);
    table.values[p] = -g * std::tanh(q[0] / width) * q[1];
  }
  const SolverConfig sc = solver_config(ctx, grid, PotentialSpec::custom_table(table));
  const auto opts = packet(ctx, {mo, mp});
  // branch 0 (object on the right) drives the pointer to y > 0
  const WaveFunction up =
      gaussian_packet(grid, std::vector{0.5 * sep, 0.0}, std::vector{so, sp}, std::vector{0.0, 0.0}, opts);
  const WaveFunction down =
      gaussian_packet(grid, std::vector{-0.5 * sep, 0.0}, std::vector{so, sp}, std::vector{0.0, 0.0}, opts);
  const EvolutionRecord r0 = run_solver(ctx, up, sc);
  const EvolutionRecord r1 = run_solver(ctx, down, sc);

  auto sector0_mass = [&](const WaveFunction& psi) {
    double s = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (grid.point(p)[1] > 0.0) s += std::norm(psi.amplitude(p));
    }
    return s * grid.cell_volume();
  };
  const double leak = std::max(1.0 - sector0_mass(r0.snapshots().back()), sector0_mass(r1.snapshots().back()));
  ctx.below("cross_sector_mass", leak, 1e-8);

  json runs = json::array();
  for (double w : ctx.nums("weights")) {
    if (!(w >= 0.0 && w <= 1.0)) fail(ErrorKind::validation, "params.weights: entries must lie in [0, 1]");
    const std::string tag = "w" + tag_number(w);
    const double c0 = std::sqrt(w), c1 = std::sqrt(1.0 - w);
    std::vector<WaveFunction> snaps;
    for (std::size_t i = 0; i < r0.snapshots().size(); ++i) {
      std::vector<cplx> a(grid.size());
      for (std::size_t p = 0; p < grid.size(); ++p) {
        a[p] = c0 * r0.snapshot(i).amplitude(p) + c1 * r1.snapshot(i).amplitude(p);
      }
      snaps.push_back(up.with_amplitudes(std::move(a)));
    }
    const EvolutionRecord rec({r0.times().begin(), r0.times().end()}, std::move(snaps), sc);
    const auto q0 = sample_initial(rec.snapshot(0), tb.n, ctx.seed);
    Ensemble ens = propagate_ensemble(rec, q0, tb.dt_traj, traj_options(ctx));
    ens.seed = ctx.seed;
    std::size_t hits = 0;
    for (const auto& tr : ens.trajectories) {
      if (tr.point(tr.size() - 1)[1] > 0.0) ++hits;
    }
    const double n = static_cast<double>(ens.size());
    const double freq = static_cast<double>(hits) / n;
    const double sigma = std::sqrt(w * (1.0 - w) / n);
    if (w == 0.0 || w == 1.0) {
      ctx.equal("sector0_frequency_" + tag, freq, w);
    } else {
      ctx.within("sector0_frequency_" + tag, freq, w - 3.0 * sigma, w + 3.0 * sigma);
    }
    runs.push_back({{"weight", w},
                    {"frequency", freq},
                    {"binomial_sigma", sigma},
                    {"born_sector0_mass", sector0_mass(rec.snapshots().back())}});
    emit_trajectories(ctx, ens, "trajectories_" + tag);
  }
  ctx.metrics["born"] = runs;
  dump_wave(ctx, "branch0_T", r0.snapshots().back());
  dump_wave(ctx, "branch1_T", r1.snapshots().back());

  // finite-dimensional POVM suite
  Rng rng(ctx.seed ^ 0x5851f42d4c957f2dULL);
  double herm = 0.0, complete = 0.0, born = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  const long models = ctx.integer("povm_models"), states = ctx.integer("povm_states");
  const int max_dim = static_cast<int>(ctx.integer("povm_max_dim"));
  for (long i = 0; i < models; ++i) {
    const MeasurementModel model = random_model(rng, max_dim);
    const Povm povm = extract_povm(model);
    const PovmDefects d = povm_defects(povm);
    herm = std::max(herm, d.hermiticity);
    complete = std::max(complete, d.completeness);
    min_eig = std::min(min_eig, d.min_eigenvalue);
    for (long j = 0; j < states; ++j) {
      const Vector psi = random_state(rng, model.dim_object);
      const Vector out = evolve_model(model, psi);
      for (std::size_t a = 0; a < povm.elements.size(); ++a) {
        const double direct = (psi.adjoint() * povm.elements[a] * psi)(0, 0).real();
        born = std::max(born, std::abs(direct - pointer_probability(model, out, a)));
      }
    }
  }
  ctx.below("povm_hermiticity", herm, 1e-10);
  ctx.below("povm_completeness", complete, 1e-10);
  ctx.above("povm_min_eigenvalue", min_eig, -1e-10);
  ctx.below("povm_born_agreement", born, 1e-10);

  const double r0v = 1.0, r1v = -1.0;
  const Povm cnot = extract_povm(cnot_model(r0v, r1v));
  const ProjectiveCheck pc = projective_observable(cnot);
  ctx.equal("cnot_projective", pc.projective ? 1.0 : 0.0, 1.0);
  double obs_err = std::numeric_limits<double>::infinity();
  if (pc.projective) {
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = r0v;
    expect(1, 1) = r1v;
    obs_err = (pc.observable - expect).cwiseAbs().maxCoeff();
  }
  ctx.below("cnot_observable_error", obs_err, 1e-10);
  const Povm weak = extract_povm(weak_coupling_model(kPi / 8.0));
  ctx.equal("weak_coupling_projective", projective_observable(weak).projective ? 1.0 : 0.0, 0.0);

  ctx.metrics["povm"] = {{"models", models},
                         {"states_per_model", states},
                         {"hermiticity", herm},
                         {"completeness", complete},
                         {"min_eigenvalue", min_eig},
                         {"born_agreement", born},
                         {"cnot_idempotency_defect", pc.max_idempotency_defect}};
  if (ctx.cfg.output.json) {
    ctx.out.text("povm_cnot.json", povm_to_json(cnot) + "\n");
    ctx.out.text("povm_weak.json", povm_to_json(weak) + "\n");
  }
}

namespace {

// N! canonicalisation: every permutation of the particle blocks maps to the
// same unordered representative, and `order` undoes the sort.
std::size_t canonicalisation_failures(Rng& rng, long trials) {
  std::size_t bad = 0;
  for (int n = 2; n <= 4; ++n) {
    for (int d = 1; d <= 3; ++d) {
      for (long t = 0; t < trials; ++t) {
        std::vector<double> q(static_cast<std::size_t>(n * d));
        for (double& x : q) x = std::floor(8.0 * rng.uniform()) - 4.0;  // coarse values force ties in leading digits
        if (t % 4 == 0) std::copy_n(q.begin(), d, q.begin() + d);     // coincident pair
        const UnorderedPoint ref = unordered_view(q, d);
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        do {
          std::vector<double> p(q.size());
          for (int b = 0; b < n; ++b) {
            std::copy_n(q.begin() + perm[static_cast<std::size_t>(b)] * d, d, p.begin() + b * d);
          }
          const UnorderedPoint v = unordered_view(p, d);
          if (v.q != ref.q || v.coincident != ref.coincident) ++bad;
          for (int b = 0; b < n; ++b) {
            const int src = v.order[static_cast<std::size_t>(b)];
            if (!std::equal(v.q.begin() + b * d, v.q.begin() + (b + 1) * d, p.begin() + src * d)) ++bad;
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (t % 4 == 0 && !ref.coincident) ++bad;
      }
    }
  }
  return bad;
}

void run_pair(Context& ctx, int sign) {
  const double sep = ctx.num("separation"), s = ctx.num("sigma"), k = ctx.num("wavevector"), m = ctx.num("mass");
  const Grid grid = lattice(ctx, 1, 2);
  const WaveFunction product = gaussian_packet(grid, std::vector{-0.5 * sep, 0.5 * sep}, std::vector{s, s},
                                               std::vector{k, -k}, packet(ctx, {m, m}));
  const WaveFunction psi0 = symmetrize(product, sign, 0, 1);
  const SolverConfig sc = solver_config(ctx, grid, PotentialSpec::zero());
  const EvolutionRecord rec = run_solver(ctx, psi0, sc);
  const TrajectoryBlock& tb = ctx.trajectory();

  double wave = 0.0, vel = 0.0;
  const std::size_t last = rec.snapshots().size() - 1;
  for (std::size_t i : {std::size_t{0}, last / 2, last}) {
    const ExchangeReport r = velocity_exchange_check(rec.snapshot(i), tb.node_epsilon);
    wave = std::max(wave, r.max_wave_violation);
    vel = std::max(vel, r.max_velocity_violation);
  }
  ctx.below("wave_exchange_violation", wave, 1e-12);
  ctx.below("velocity_exchange_violation", vel, 1e-9);

  const auto q0 = sample_initial(psi0, tb.n, ctx.seed);
  Ensemble ens = propagate_ensemble(rec, q0, tb.dt_traj, traj_options(ctx));
  ens.seed = ctx.seed;
  std::vector<double> swapped(q0.size());
  for (std::size_t i = 0; i < q0.size(); i += 2) {
    swapped[i] = q0[i + 1];
    swapped[i + 1] = q0[i];
  }
  const Ensemble mirror = propagate_ensemble(rec, swapped, tb.dt_traj, traj_options(ctx));
  double flow = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const auto& a = ens.trajectories[i];
    const auto& b = mirror.trajectories[i];
    for (std::size_t t = 0; t < a.size(); ++t) {
      const auto p = a.point(t), q = b.point(t);
      flow = std::max(flow, std::hypot(p[0] - q[1], p[1] - q[0]));
    }
  }
  ctx.below("flow_equivariance", flow, 10.0 * kIntegratorTolerance);
  const double sep_min = min_pair_separation(ens, 1);
  if (sign < 0) ctx.above("min_pair_separation", sep_min, 0.0);
  const TvSeries tv = tv_series(ens, rec);
  ctx.below("tv_max", tv.max(), 0.05);

  Rng rng(ctx.seed ^ 0xda942042e4dd58b5ULL);
  const auto canon = canonicalisation_failures(rng, ctx.integer("canonical_trials"));
  ctx.equal("canonicalisation_failures", static_cast<double>(canon), 0.0);

  json report;
  report["symmetry"] = sign > 0 ? "bosonic" : "fermionic";
  report["max_wave_violation"] = wave;
  report["max_velocity_violation"] = vel;
  report["max_flow_violation"] = flow;
  report["min_pair_separation"] = sep_min;
  report["canonicalisation_failures"] = canon;
  ctx.metrics["exchange"] = report;
  ctx.metrics["tv"] = tv_json(tv, ens.size());
  if (ctx.cfg.output.json) {
    ctx.out.json_file("exchange_report.json", report);
    ctx.out.json_file("equivariance.json", tv_json(tv, ens.size()));
  }
  emit_trajectories(ctx, ens, "trajectories");
  dump_wave(ctx, "psi_0", psi0);
  dump_wave(ctx, "psi_T", rec.snapshots().back());
}

QtmConfig qtm_config(const Context& ctx) {
  const QtmBlock& b = ctx.qtm();
  QtmConfig c;
  c.bandwidth_scale = b.bandwidth_scale;
  c.variance_preserving = b.variance_preserving;
  c.kernel_cutoff = b.kernel_cutoff;
  c.density_floor = b.density_floor;
  c.force_cap = b.force_cap;
  c.reconstruct_floor = b.reconstruct_floor;
  c.neighbours = b.neighbours;
  c.threads = ctx.threads;
  return c;
}

}  // namespace

void run_two_fermion(Context& ctx) { run_pair(ctx, -1); }
void run_two_boson(Context& ctx) { run_pair(ctx, +1); }

void run_qtm_free_gaussian(Context& ctx) {
  const double c = ctx.num("center"), s0 = ctx.num("sigma0"), k = ctx.num("wavevector"), m = ctx.num("mass");
  const QtmBlock& qb = ctx.qtm();
  if (std::abs(qb.total_time - ctx.solver().total_time) > 1e-12) {
    fail(ErrorKind::validation, "qtm.T: must equal solver.T (the Eulerian reference ends at solver.T)");
  }
  const Grid grid = lattice(ctx, 1, 1);
  const WaveFunction psi0 = gaussian_packet(grid, std::vector{c}, std::vector{s0}, std::vector{k}, packet(ctx, {m}));
  const SolverConfig sc = solver_config(ctx, grid, PotentialSpec::zero());
  const EvolutionRecord rec = run_solver(ctx, psi0, sc);
  const WaveFunction& exact = rec.snapshots().back();
  const QtmConfig cfg = qtm_config(ctx);
  const double T = qb.total_time;
  const auto whole = [](double t, double dt) { return static_cast<int>(std::lround(t / dt)); };

  const QtmRun run = qtm_run(psi0, sc.potential, qb.n, T, qb.dt, ctx.seed, cfg, whole(T, qb.dt));
  const WaveFunction start = run.reconstructions.front().wave(psi0.masses(), kHbar);
  const WaveFunction end = run.reconstructions.back().wave(psi0.masses(), kHbar);
  const double mod0 = l2_modulus_distance(start, psi0);
  const double mod = l2_modulus_distance(end, exact);
  const double full = l2_distance_phase_aligned(end, exact);
  ctx.below("modulus_l2_at_T", mod, 0.05);
  ctx.below("wave_l2_gauge_aligned_at_T", full, 0.05);

  auto endpoint_rms = [&](const QtmState& first, const QtmState& last) {
    const auto& a = first.points;
    const auto& b = last.points;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = b[i] - closed::free_path(a[i], T, c, s0, k, m, kHbar);
      s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
  };

  // refinement lattice: rows over ensemble size, columns over step size
  const auto ns = ctx.nums("refinement_n");
  const auto dts = ctx.nums("refinement_dt");
  const long seeds = ctx.integer("refinement_seeds");
  std::vector<std::vector<double>> err(ns.size(), std::vector<double>(dts.size(), 0.0));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (std::size_t j = 0; j < dts.size(); ++j) {
      const long steps = whole(T, dts[j]);
      if (std::abs(static_cast<double>(steps) * dts[j] - T) > 1e-9 * T) {
        fail(ErrorKind::validation, "params.refinement_dt: entries must divide qtm.T");
      }
      // endpoints only, so no reconstruction on the way
      for (long s = 0; s < seeds; ++s) {
        const QtmState first = qtm_init(psi0, static_cast<std::size_t>(ns[i]), ctx.seed + static_cast<std::uint64_t>(s));
        QtmState st = first;
        for (long step = 0; step < steps; ++step) st = qtm_step(st, sc.potential, dts[j], grid, cfg);
        err[i][j] += endpoint_rms(first, st) / static_cast<double>(seeds);
      }
    }
  }
  std::size_t violations = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (std::size_t j = 0; j < dts.size(); ++j) {
      if (i + 1 < ns.size() && !(err[i + 1][j] < err[i][j])) ++violations;
      if (j + 1 < dts.size() && !(err[i][j + 1] < err[i][j])) ++violations;
    }
  }
  ctx.equal("refinement_monotonicity_violations", static_cast<double>(violations), 0.0);

  ctx.metrics["reconstruction"] = {{"modulus_l2_at_0", mod0},
                                   {"modulus_l2_at_T", mod},
                                   {"wave_l2_gauge_aligned_at_T", full},
                                   {"bandwidth_at_T", run.states.back().bandwidth},
                                   {"endpoint_rms", endpoint_rms(run.states.front(), run.states.back())}};
  ctx.metrics["refinement"] = {{"n", ns}, {"dt", dts}, {"seeds", seeds}, {"endpoint_rms", err}};

  if (ctx.cfg.output.csv) {
    const QtmState& st = run.states.back();
    std::string csv = "id,q,v\n";
    for (std::size_t i = 0; i < st.size(); ++i) {
      csv += std::to_string(i) + "," + fmt(st.points[i]) + "," + fmt(st.velocities[i]) + "\n";
    }
    ctx.out.text("qtm_final.csv", std::move(csv));
    std::string table = "n,dt,endpoint_rms\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      for (std::size_t j = 0; j < dts.size(); ++j) table += fmt(ns[i]) + "," + fmt(dts[j]) + "," + fmt(err[i][j]) + "\n";
    }
    ctx.out.text("refinement.csv", std::move(table));
  }
  dump_wave(ctx, "psi_hat_T", end);
  dump_wave(ctx, "psi_T", exact);
}

}  // namespace bohm::scenario
