#include "bohm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bohm/error.hpp"
#include "bohm/parallel.hpp"
#include "bohm/random.hpp"

namespace bohm {

std::string_view to_string(TrajectoryFlag f) noexcept {
  switch (f) {
    case TrajectoryFlag::ok: return "ok";
    case TrajectoryFlag::node_regularized: return "node_regularized";
    case TrajectoryFlag::left_domain: return "left_domain";
  }
  return "ok";
}

bool Trajectory::all_ok() const {
  return std::all_of(flags.begin(), flags.end(), [](TrajectoryFlag f) { return f == TrajectoryFlag::ok; });
}

std::size_t Ensemble::time_index(double t) const {
  for (std::size_t i = 0; i < times->size(); ++i) {
    if (std::abs((*times)[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  }
  fail(ErrorKind::domain, "time " + std::to_string(t) + " is not in the ensemble time base");
}

// ---------------------------------------------------------------------------
// sampling

namespace {

std::vector<double> axis_marginal(const Grid& grid, std::span<const double> rho, int axis) {
  std::vector<double> m(static_cast<std::size_t>(grid.points(axis)), 0.0);
  for (std::size_t p = 0; p < rho.size(); ++p) {
    m[(p / grid.stride(axis)) % m.size()] += rho[p];
  }
  return m;
}

double cell_offset(const Grid& grid, int axis, int cell, double u) {
  const double h = grid.spacing(axis);
  double x = grid.coordinate(axis, cell) + (u - 0.5) * h;
  if (!grid.periodic()) {
    x = std::clamp(x, grid.coordinate(axis, 0), grid.coordinate(axis, grid.points(axis) - 1));
  }
  return x;
}

}  // namespace

bool is_product_density(const Grid& grid, std::span<const double> rho) {
  const int dim = grid.dimension();
  if (dim == 1) return true;
  const double total = std::accumulate(rho.begin(), rho.end(), 0.0);
  if (!(total > 0.0)) return false;
  std::vector<std::vector<double>> marg;
  for (int a = 0; a < dim; ++a) {
    auto m = axis_marginal(grid, rho, a);
    for (double& x : m) x /= total;
    marg.push_back(std::move(m));
  }
  const double peak = *std::max_element(rho.begin(), rho.end());
  for (std::size_t p = 0; p < rho.size(); ++p) {
    double prod = total;
    for (int a = 0; a < dim; ++a) {
      prod *= marg[static_cast<std::size_t>(a)][(p / grid.stride(a)) % static_cast<std::size_t>(grid.points(a))];
    }
    if (std::abs(prod - rho[p]) > 1e-10 * peak) return false;
  }
  return true;
}

std::vector<double> sample_initial(const WaveFunction& psi0, std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::configuration, "sample_initial: n must be >= 1");
  const Grid& g = psi0.grid();
  const int dim = g.dimension();
  const auto ud = static_cast<std::size_t>(dim);
  const auto rho = density(psi0).values;
  const double total = std::accumulate(rho.begin(), rho.end(), 0.0);
  require(total > 0.0, ErrorKind::zero_norm, "sample_initial: density vanishes");
  Rng rng(seed);
  std::vector<double> out(n * ud);

  if (is_product_density(g, rho)) {
    std::vector<std::vector<double>> cdf;
    for (int a = 0; a < dim; ++a) {
      auto m = axis_marginal(g, rho, a);
      std::partial_sum(m.begin(), m.end(), m.begin());
      for (double& x : m) x /= m.back();
      cdf.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (int a = 0; a < dim; ++a) {
        const auto& c = cdf[static_cast<std::size_t>(a)];
        const double u = rng.uniform();
        auto it = std::upper_bound(c.begin(), c.end(), u);
        const int cell = static_cast<int>(std::min<std::ptrdiff_t>(it - c.begin(), static_cast<std::ptrdiff_t>(c.size()) - 1));
        out[i * ud + static_cast<std::size_t>(a)] = cell_offset(g, a, cell, rng.uniform());
      }
    }
    return out;
  }

  // Metropolis on the piecewise-constant cell density.
  constexpr int kBurnIn = 1000;
  constexpr int kStride = 50;
  std::vector<double> step(ud);
  for (int a = 0; a < dim; ++a) {
    const auto m = axis_marginal(g, rho, a);
    double mean = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double x = g.coordinate(a, static_cast<int>(i));
      mean += m[i] * x;
      sq += m[i] * x * x;
    }
    mean /= total;
    const double var = std::max(sq / total - mean * mean, g.spacing(a) * g.spacing(a));
    step[static_cast<std::size_t>(a)] = std::sqrt(var);
  }
  auto density_at = [&](std::span<const double> q) -> double {
    std::vector<int> idx(ud);
    for (int a = 0; a < dim; ++a) {
      const int c = g.cell_of(a, q[static_cast<std::size_t>(a)]);
      if (c < 0) return 0.0;
      idx[static_cast<std::size_t>(a)] = c;
    }
    return rho[g.flat_index(idx)];
  };
  const auto start = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
  std::vector<double> cur = g.point(start);
  double cur_rho = density_at(cur);
  std::vector<double> prop(ud);
  auto advance = [&] {
    for (std::size_t a = 0; a < ud; ++a) {
      double x = cur[a] + step[a] * rng.normal();
      if (g.periodic()) x = g.wrap(static_cast<int>(a), x);
      prop[a] = x;
    }
    const bool inside = g.contains(prop);
    const double pr = inside ? density_at(prop) : 0.0;
    const double u = rng.uniform();
    if (pr > 0.0 && u * cur_rho < pr) {
      cur.swap(prop);
      cur_rho = pr;
    }
  };
  for (int i = 0; i < kBurnIn; ++i) advance();
  for (std::size_t i = 0; i < n; ++i) {
    for (int s = 0; s < kStride; ++s) advance();
    // uniform jitter inside the current cell keeps the target piecewise constant
    for (int a = 0; a < dim; ++a) {
      const int cell = g.cell_of(a, cur[static_cast<std::size_t>(a)]);
      out[i * ud + static_cast<std::size_t>(a)] = cell_offset(g, a, cell, rng.uniform());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// integration

namespace {

struct TimeBase {
  std::shared_ptr<const std::vector<double>> times;
  std::vector<std::size_t> recorded_steps;
  long steps = 0;
};

TimeBase make_time_base(const EvolutionRecord& record, double dt_traj, int stride) {
  require(dt_traj > 0.0 && std::isfinite(dt_traj), ErrorKind::configuration, "dt_traj must be > 0");
  require(stride >= 1, ErrorKind::configuration, "output stride must be >= 1");
  const auto ts = record.times();
  for (std::size_t i = 1; i < ts.size(); ++i) {
    require(dt_traj <= ts[i] - ts[i - 1] + 1e-12, ErrorKind::configuration,
            "dt_traj exceeds the snapshot interval of the record");
  }
  const double ratio = record.final_time() / dt_traj;
  TimeBase tb;
  tb.steps = std::lround(ratio);
  require(std::abs(ratio - static_cast<double>(tb.steps)) <= 1e-9 * std::max(1.0, ratio), ErrorKind::configuration,
          "record duration must be an integer multiple of dt_traj");
  auto t = std::make_shared<std::vector<double>>();
  for (long k = 0; k <= tb.steps; ++k) {
    if (k % stride == 0 || k == tb.steps) {
      t->push_back(static_cast<double>(k) * dt_traj);
      tb.recorded_steps.push_back(static_cast<std::size_t>(k));
    }
  }
  tb.times = std::move(t);
  return tb;
}

struct Walker {
  std::vector<double> q;
  bool left = false;
  bool regularized = false;
};

// One RK4 step; returns false when a stage leaves a box domain.
bool rk4_step(const VelocityProbe& p0, const VelocityProbe& ph, const VelocityProbe& p1, double dt, Walker& w,
              std::vector<double>& scratch) {
  const std::size_t d = w.q.size();
  scratch.resize(5 * d);
  double* k1 = scratch.data();
  double* k2 = k1 + d;
  double* k3 = k2 + d;
  double* k4 = k3 + d;
  double* y = k4 + d;
  const Grid& g = p0.grid();
  auto eval = [&](const VelocityProbe& pr, const double* at, double* k) {
    std::span<const double> s(at, d);
    if (!g.contains(s)) return false;
    if (pr.velocity_at(s, std::span<double>(k, d))) w.regularized = true;
    return true;
  };
  if (!eval(p0, w.q.data(), k1)) return false;
  for (std::size_t a = 0; a < d; ++a) y[a] = w.q[a] + 0.5 * dt * k1[a];
  if (!eval(ph, y, k2)) return false;
  for (std::size_t a = 0; a < d; ++a) y[a] = w.q[a] + 0.5 * dt * k2[a];
  if (!eval(ph, y, k3)) return false;
  for (std::size_t a = 0; a < d; ++a) y[a] = w.q[a] + dt * k3[a];
  if (!eval(p1, y, k4)) return false;
  for (std::size_t a = 0; a < d; ++a) y[a] = w.q[a] + dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
  if (!g.contains(std::span<const double>(y, d))) return false;
  std::copy(y, y + d, w.q.begin());
  return true;
}

}  // namespace

Ensemble propagate_ensemble(const EvolutionRecord& record, std::span<const double> q0, double dt_traj,
                            const TrajectoryOptions& options) {
  const Grid& g = record.grid();
  const auto d = static_cast<std::size_t>(g.dimension());
  require(!q0.empty() && q0.size() % d == 0, ErrorKind::domain, "start list must hold n × D coordinates");
  const std::size_t n = q0.size() / d;
  const TimeBase tb = make_time_base(record, dt_traj, options.output_stride);
  const int threads = resolve_threads(options.threads);

  std::vector<Walker> walkers(n);
  Ensemble ens;
  ens.times = tb.times;
  ens.source = &record;
  ens.trajectories.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    walkers[i].q.assign(q0.begin() + static_cast<std::ptrdiff_t>(i * d), q0.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    for (double x : walkers[i].q) require(std::isfinite(x), ErrorKind::domain, "non-finite start point");
    require(g.contains(walkers[i].q), ErrorKind::domain, "start point outside the grid domain");
    auto& tr = ens.trajectories[i];
    tr.times = tb.times;
    tr.dimension = static_cast<int>(d);
    tr.points.reserve(tb.times->size() * d);
    tr.flags.reserve(tb.times->size());
  }

  StateCursor cursor(record);
  auto probe_at = [&](double t) { return VelocityProbe(cursor.at(t), options.interpolation, options.node_epsilon); };
  VelocityProbe p0 = probe_at(0.0);

  auto record_sample = [&](std::size_t i) {
    Walker& w = walkers[i];
    auto& tr = ens.trajectories[i];
    tr.points.insert(tr.points.end(), w.q.begin(), w.q.end());
    TrajectoryFlag f = TrajectoryFlag::ok;
    if (w.left) {
      f = TrajectoryFlag::left_domain;
    } else if (w.regularized) {
      f = TrajectoryFlag::node_regularized;
    }
    tr.flags.push_back(f);
    w.regularized = false;
  };

  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> v(d);
    if (p0.velocity_at(walkers[i].q, v)) walkers[i].regularized = true;
    record_sample(i);
  });
  std::size_t next_record = 1;
  for (long k = 0; k < tb.steps; ++k) {
    const double t0 = static_cast<double>(k) * dt_traj;
    VelocityProbe ph = probe_at(t0 + 0.5 * dt_traj);
    VelocityProbe p1 = probe_at(static_cast<double>(k + 1) * dt_traj);
    const bool record_now = next_record < tb.recorded_steps.size() &&
                            tb.recorded_steps[next_record] == static_cast<std::size_t>(k + 1);
    parallel_for(n, threads, [&](std::size_t i) {
      Walker& w = walkers[i];
      thread_local std::vector<double> scratch;
      if (!w.left && !rk4_step(p0, ph, p1, dt_traj, w, scratch)) w.left = true;
      if (record_now) record_sample(i);
    });
    if (record_now) ++next_record;
    p0 = std::move(p1);
  }
  return ens;
}

Trajectory integrate_trajectory(const EvolutionRecord& record, std::span<const double> q0, double dt_traj,
                                const TrajectoryOptions& options) {
  require(q0.size() == static_cast<std::size_t>(record.grid().dimension()), ErrorKind::domain,
          "start point dimension does not match the grid");
  auto ens = propagate_ensemble(record, q0, dt_traj, options);
  return std::move(ens.trajectories.front());
}

// ---------------------------------------------------------------------------
// statistics

ScalarField empirical_density(const Ensemble& ensemble, double t, const Grid& grid) {
  const std::size_t k = ensemble.time_index(t);
  const auto d = static_cast<std::size_t>(grid.dimension());
  ScalarField out{grid, std::vector<double>(grid.size(), 0.0), {}};
  std::vector<int> idx(d);
  std::size_t counted = 0;
  for (const auto& tr : ensemble.trajectories) {
    require(static_cast<std::size_t>(tr.dimension) == d, ErrorKind::domain, "ensemble dimension does not match grid");
    if (tr.flags[k] == TrajectoryFlag::left_domain) continue;
    const auto q = tr.point(k);
    bool inside = true;
    for (std::size_t a = 0; a < d; ++a) {
      idx[a] = grid.cell_of(static_cast<int>(a), q[a]);
      if (idx[a] < 0) inside = false;
    }
    if (!inside) continue;
    out.values[grid.flat_index(idx)] += 1.0;
    ++counted;
  }
  if (counted > 0) {
    const double scale = 1.0 / (static_cast<double>(counted) * grid.cell_volume());
    for (double& x : out.values) x *= scale;
  }
  return out;
}

double marginal_tv_distance(const Grid& grid, std::span<const double> rho, std::span<const double> positions,
                            int bins) {
  require(bins >= 1, ErrorKind::configuration, "bins must be >= 1");
  require(rho.size() == grid.size(), ErrorKind::domain, "density does not match grid");
  const auto d = static_cast<std::size_t>(grid.dimension());
  require(positions.size() % d == 0, ErrorKind::domain, "positions must hold n × D coordinates");
  const std::size_t n = positions.size() / d;
  const double total = std::accumulate(rho.begin(), rho.end(), 0.0);
  require(total > 0.0, ErrorKind::zero_norm, "reference density vanishes");
  double worst = 0.0;
  for (int a = 0; a < grid.dimension(); ++a) {
    const int m = grid.points(a);
    int nb = std::min(bins, m);
    while (m % nb != 0) --nb;  // bins of whole cells
    const int per = m / nb;
    std::vector<double> ref(static_cast<std::size_t>(nb), 0.0);
    const auto marg = axis_marginal(grid, rho, a);
    for (int i = 0; i < m; ++i) ref[static_cast<std::size_t>(i / per)] += marg[static_cast<std::size_t>(i)] / total;
    std::vector<double> emp(static_cast<std::size_t>(nb), 0.0);
    std::size_t counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = grid.cell_of(a, positions[i * d + static_cast<std::size_t>(a)]);
      if (c < 0) continue;
      emp[static_cast<std::size_t>(c / per)] += 1.0;
      ++counted;
    }
    double tv = 0.0;
    for (int b = 0; b < nb; ++b) {
      const double e = counted ? emp[static_cast<std::size_t>(b)] / static_cast<double>(counted) : 0.0;
      tv += std::abs(e - ref[static_cast<std::size_t>(b)]);
    }
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

double equivariance_distance(const Ensemble& ensemble, const EvolutionRecord& record, double t, int bins) {
  const std::size_t k = ensemble.time_index(t);
  const Grid& g = record.grid();
  const auto d = static_cast<std::size_t>(g.dimension());
  std::vector<double> pos;
  pos.reserve(ensemble.size() * d);
  for (const auto& tr : ensemble.trajectories) {
    if (tr.flags[k] == TrajectoryFlag::left_domain) continue;
    const auto q = tr.point(k);
    pos.insert(pos.end(), q.begin(), q.end());
  }
  const auto rho = density(record.state_at(t)).values;
  return marginal_tv_distance(g, rho, pos, bins);
}

}  // namespace bohm
