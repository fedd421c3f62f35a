#include "bohm/qtm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>
#include <sstream>

#include "bohm/error.hpp"
#include "bohm/guidance.hpp"
#include "bohm/interpolate.hpp"
#include "bohm/parallel.hpp"
#include "bohm/spectral.hpp"
#include "bohm/trajectory.hpp"

namespace bohm {

namespace {

std::vector<double> axis_std(std::span<const double> pts, int dim, std::vector<double>* mean_out = nullptr) {
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t n = pts.size() / d;
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) mean[a] += pts[i * d + a];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      const double x = pts[i * d + a] - mean[a];
      sd[a] += x * x;
    }
  }
  for (double& s : sd) s = std::sqrt(s / static_cast<double>(n > 1 ? n - 1 : 1));
  if (mean_out) *mean_out = mean;
  return sd;
}

double min_image(const Grid& g, int a, double dx) {
  if (!g.periodic()) return dx;
  const double l = g.extent(a);
  return dx - l * std::nearbyint(dx / l);
}

}  // namespace

double default_bandwidth(std::span<const double> points, int dimension, double scale) {
  require(dimension >= 1 && !points.empty() && points.size() % static_cast<std::size_t>(dimension) == 0,
          ErrorKind::domain, "default_bandwidth: points must hold n × D coordinates");
  const std::size_t n = points.size() / static_cast<std::size_t>(dimension);
  const auto sd = axis_std(points, dimension);
  double logsum = 0.0;
  for (double s : sd) logsum += std::log(std::max(s, 1e-300));
  const double sigma = std::exp(logsum / dimension);
  return scale * sigma * std::pow(static_cast<double>(n), -1.0 / (dimension + 4));
}

ScalarField estimate_density(std::span<const double> points, double bandwidth, const Grid& grid,
                             double kernel_cutoff) {
  require(bandwidth > 0.0 && std::isfinite(bandwidth), ErrorKind::configuration, "bandwidth must be > 0");
  const int dim = grid.dimension();
  const auto d = static_cast<std::size_t>(dim);
  require(!points.empty() && points.size() % d == 0, ErrorKind::domain, "points must hold n × D coordinates");
  const std::size_t n = points.size() / d;

  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  ScalarField out{grid, std::vector<double>(grid.size(), 0.0), {}};
  auto& acc = out.values;
  {
    std::array<std::vector<std::pair<std::size_t, double>>, 3> w;
    for (std::size_t i = 0; i < n; ++i) {
      bool any = true;
      for (int a = 0; a < dim; ++a) {
        auto& wa = w[static_cast<std::size_t>(a)];
        wa.clear();
        const int m = grid.points(a);
        const double h = grid.spacing(a);
        const double q = points[i * d + static_cast<std::size_t>(a)];
        const int reach = static_cast<int>(std::ceil(kernel_cutoff * bandwidth / h)) + 1;
        const int centre = static_cast<int>(std::floor((q - grid.lower(a)) / h + 0.5));
        const int lo = grid.periodic() ? centre - std::min(reach, m / 2) : std::max(0, centre - reach);
        const int hi = grid.periodic() ? lo + std::min(2 * reach, m - 1) : std::min(m - 1, centre + reach);
        for (int j = lo; j <= hi; ++j) {
          const int jj = grid.periodic() ? ((j % m) + m) % m : j;
          const double dx = min_image(grid, a, grid.coordinate(a, jj) - q);
          const double v = std::exp(-dx * dx * inv2h2);
          if (v > 0.0) wa.emplace_back(static_cast<std::size_t>(jj) * grid.stride(a), v);
        }
        if (wa.empty()) any = false;
      }
      if (!any) continue;
      if (dim == 1) {
        for (const auto& [p, v] : w[0]) acc[p] += v;
      } else if (dim == 2) {
        for (const auto& [p0, v0] : w[0]) {
          for (const auto& [p1, v1] : w[1]) acc[p0 + p1] += v0 * v1;
        }
      } else {
        for (const auto& [p0, v0] : w[0]) {
          for (const auto& [p1, v1] : w[1]) {
            for (const auto& [p2, v2] : w[2]) acc[p0 + p1 + p2] += v0 * v1 * v2;
          }
        }
      }
    }
  }
  const double peak = *std::max_element(out.values.begin(), out.values.end());
  require(peak > 0.0, ErrorKind::degenerate_input, "density estimate vanishes on the grid");
  const double floor = 1e-14 * peak;
  for (double& x : out.values) x = std::max(x, floor);
  const double total = std::accumulate(out.values.begin(), out.values.end(), 0.0) * grid.cell_volume();
  for (double& x : out.values) x /= total;
  return out;
}

QtmState qtm_init(const WaveFunction& psi0, std::size_t n, std::uint64_t seed) {
  require(n >= 100, ErrorKind::configuration, "QTM ensembles need n >= 100");
  const Grid& g = psi0.grid();
  QtmState s;
  s.dimension = g.dimension();
  s.dims_per_particle = g.dims_per_particle();
  s.masses.assign(psi0.masses().begin(), psi0.masses().end());
  s.hbar = psi0.hbar();
  s.points = sample_initial(psi0, n, seed);
  s.velocities.resize(s.points.size());
  VelocityProbe probe(psi0);
  const auto d = static_cast<std::size_t>(s.dimension);
  for (std::size_t i = 0; i < n; ++i) {
    probe.velocity_at(std::span<const double>(s.points.data() + i * d, d),
                      std::span<double>(s.velocities.data() + i * d, d));
  }
  s.bandwidth = default_bandwidth(s.points, s.dimension);
  return s;
}

namespace {

// Variance-preserving kernel centres: x̄ + a (x - x̄) with a = sqrt(1 - h²/σ̂²).
std::vector<double> shrunk_centres(std::span<const double> pts, int dim, double h) {
  std::vector<double> mean;
  const auto sd = axis_std(pts, dim, &mean);
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> a(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double r = sd[k] > 0.0 ? h * h / (sd[k] * sd[k]) : 1.0;
    a[k] = r < 1.0 ? std::sqrt(1.0 - r) : 0.0;
  }
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t k = i % d;
    out[i] = mean[k] + a[k] * (pts[i] - mean[k]);
  }
  return out;
}

ScalarField ensemble_density(const QtmState& s, const Grid& grid, const QtmConfig& cfg, double& bandwidth) {
  bandwidth = default_bandwidth(s.points, s.dimension, cfg.bandwidth_scale);
  const double min_h = [&] {
    double m = grid.spacing(0);
    for (int a = 1; a < grid.dimension(); ++a) m = std::min(m, grid.spacing(a));
    return m;
  }();
  require(bandwidth > 0.25 * min_h, ErrorKind::configuration,
          "KDE bandwidth is below a quarter of the grid spacing; refine the grid or raise bandwidth_scale");
  if (cfg.variance_preserving) {
    const auto c = shrunk_centres(s.points, s.dimension, bandwidth);
    return estimate_density(c, bandwidth, grid, cfg.kernel_cutoff);
  }
  return estimate_density(s.points, bandwidth, grid, cfg.kernel_cutoff);
}

// ∇V_qu on the lattice from derivatives of ρ itself:
// V_qu = -Σ_a c_a (∂_a²ρ / 2ρ - (∂_aρ)² / 4ρ²), c_a = ħ²/2m_a.
VectorField qu_gradient_from_density(const ScalarField& rho, const QtmState& s, double floor) {
  const Grid& g = rho.grid;
  const int dim = g.dimension();
  const auto d = static_cast<std::size_t>(dim);
  VectorField out{g, dim, std::vector<double>(g.size() * d, 0.0), node_mask(rho.values, floor)};
  Differentiator diff(g, rho.values);
  auto der = [&](std::initializer_list<int> axes) {
    DerivativeOrder o{0, 0, 0};
    for (int a : axes) o[static_cast<std::size_t>(a)] += 1;
    return diff.derivative_real(o);
  };
  std::vector<std::vector<double>> g1(d);
  for (int a = 0; a < dim; ++a) g1[static_cast<std::size_t>(a)] = der({a});
  for (int a = 0; a < dim; ++a) {
    const double m = s.masses[static_cast<std::size_t>(a / s.dims_per_particle)];
    const double c = s.hbar * s.hbar / (2.0 * m);
    const auto laa = der({a, a});
    const auto& ga = g1[static_cast<std::size_t>(a)];
    for (int b = 0; b < dim; ++b) {
      const auto laab = der({a, a, b});
      const auto gab = der({a, b});
      const auto& gb = g1[static_cast<std::size_t>(b)];
      for (std::size_t p = 0; p < g.size(); ++p) {
        if (!out.mask[p]) continue;
        const double r = rho.values[p];
        const double term = laab[p] / (2.0 * r) - laa[p] * gb[p] / (2.0 * r * r) - ga[p] * gab[p] / (2.0 * r * r) +
                            ga[p] * ga[p] * gb[p] / (2.0 * r * r * r);
        out.values[p * d + static_cast<std::size_t>(b)] -= c * term;
      }
    }
  }
  return out;
}

void compute_accelerations(QtmState& s, const PotentialSpec& v, const Grid& grid, const QtmConfig& cfg) {
  double bw = 0.0;
  const auto rho = ensemble_density(s, grid, cfg, bw);
  s.bandwidth = bw;
  const auto qgrad = qu_gradient_from_density(rho, s, cfg.density_floor);
  const auto d = static_cast<std::size_t>(s.dimension);
  const std::size_t n = s.size();
  s.accelerations.assign(n * d, 0.0);
  std::vector<std::uint8_t> capped(n, 0);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    std::vector<double> q(s.points.begin() + static_cast<std::ptrdiff_t>(i * d),
                          s.points.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    std::vector<double> f(d, 0.0), gv(d, 0.0);
    if (grid.periodic()) {
      for (std::size_t a = 0; a < d; ++a) q[a] = grid.wrap(static_cast<int>(a), q[a]);
    }
    Stencil st;
    if (multilinear_stencil(grid, q, st)) {
      bool clean = true;
      for (int c = 0; c < st.count; ++c) {
        if (st.weight[static_cast<std::size_t>(c)] > 0.0 && !qgrad.mask[st.index[static_cast<std::size_t>(c)]]) clean = false;
      }
      if (clean) interpolate(st, qgrad.values, qgrad.components, f);
    }
    if (!v.is_zero()) v.gradient(q, gv);
    double norm2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double force = -(f[a] + gv[a]);
      norm2 += force * force;
      const double m = s.masses[a / static_cast<std::size_t>(s.dims_per_particle)];
      s.accelerations[i * d + a] = force / m;
    }
    if (!(std::sqrt(norm2) <= cfg.force_cap)) capped[i] = 1;
  });
  const auto bad = static_cast<std::size_t>(std::count(capped.begin(), capped.end(), std::uint8_t{1}));
  if (static_cast<double>(bad) > 0.01 * static_cast<double>(n)) {
    std::vector<double> lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
      if (!capped[i]) continue;
      for (std::size_t a = 0; a < d; ++a) {
        lo[a] = std::min(lo[a], s.points[i * d + a]);
        hi[a] = std::max(hi[a], s.points[i * d + a]);
      }
    }
    std::ostringstream msg;
    msg << "lagrangian-qtm: force above cap " << cfg.force_cap << " at " << bad << " of " << n
        << " points (t = " << s.time << ") in region";
    for (std::size_t a = 0; a < d; ++a) msg << " [" << lo[a] << ", " << hi[a] << "]";
    fail(ErrorKind::numerical_instability, msg.str());
  }
}

}  // namespace

QtmState qtm_step(const QtmState& state, const PotentialSpec& v, double dt, const Grid& grid, const QtmConfig& config) {
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::configuration, "qtm_step: dt must be > 0");
  require(grid.dimension() == state.dimension, ErrorKind::domain, "qtm_step: grid dimension mismatch");
  QtmState s = state;
  if (s.accelerations.size() != s.points.size()) compute_accelerations(s, v, grid, config);
  const std::vector<double> a0 = s.accelerations;
  for (std::size_t i = 0; i < s.points.size(); ++i) s.points[i] += s.velocities[i] * dt + 0.5 * a0[i] * dt * dt;
  s.time = state.time + dt;
  compute_accelerations(s, v, grid, config);
  for (std::size_t i = 0; i < s.points.size(); ++i) s.velocities[i] += 0.5 * (a0[i] + s.accelerations[i]) * dt;
  return s;
}

// ---------------------------------------------------------------------------
// reconstruction

std::vector<double> scattered_velocity(const QtmState& state, const Grid& grid, int neighbours) {
  require(neighbours >= 1, ErrorKind::configuration, "neighbours must be >= 1");
  const int dim = grid.dimension();
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t n = state.size();
  std::vector<std::vector<std::size_t>> bucket(grid.size());
  std::vector<int> idx(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < dim; ++a) {
      const double x = state.points[i * d + static_cast<std::size_t>(a)];
      int c = grid.cell_of(a, x);
      if (c < 0) c = x < grid.lower(a) ? 0 : grid.points(a) - 1;
      idx[static_cast<std::size_t>(a)] = c;
    }
    bucket[grid.flat_index(idx)].push_back(i);
  }
  double hmin = grid.spacing(0);
  int reach_all = 0;
  for (int a = 0; a < dim; ++a) {
    hmin = std::min(hmin, grid.spacing(a));
    reach_all = std::max(reach_all, grid.points(a));
  }
  const auto k = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(neighbours), n));
  std::vector<double> out(grid.size() * d, 0.0);
  std::vector<double> q(d);
  using Cand = std::pair<double, std::size_t>;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.point(p, q);
    const auto home = grid.unflatten(p);
    std::priority_queue<Cand> heap;
    for (int r = 0;; ++r) {
      heap = {};
      std::array<std::vector<int>, 3> cells;
      bool covers = true;
      for (int a = 0; a < dim; ++a) {
        const int m = grid.points(a);
        auto& ca = cells[static_cast<std::size_t>(a)];
        if (grid.periodic() && 2 * r + 1 >= m) {
          for (int j = 0; j < m; ++j) ca.push_back(j);
        } else {
          for (int o = -r; o <= r; ++o) {
            int j = home[static_cast<std::size_t>(a)] + o;
            if (grid.periodic()) j = ((j % m) + m) % m;
            if (j >= 0 && j < m) ca.push_back(j);
          }
          if (static_cast<int>(ca.size()) < m) covers = false;
        }
      }
      std::array<int, 3> it{0, 0, 0};
      while (true) {
        for (int a = 0; a < dim; ++a) idx[static_cast<std::size_t>(a)] = cells[static_cast<std::size_t>(a)][static_cast<std::size_t>(it[static_cast<std::size_t>(a)])];
        for (std::size_t m : bucket[grid.flat_index(idx)]) {
          double dist2 = 0.0;
          for (int a = 0; a < dim; ++a) {
            const double dx = min_image(grid, a, state.points[m * d + static_cast<std::size_t>(a)] - q[static_cast<std::size_t>(a)]);
            dist2 += dx * dx;
          }
          if (heap.size() < k) {
            heap.emplace(dist2, m);
          } else if (Cand{dist2, m} < heap.top()) {
            heap.pop();
            heap.emplace(dist2, m);
          }
        }
        int a = 0;
        for (; a < dim; ++a) {
          auto& c = it[static_cast<std::size_t>(a)];
          if (++c < static_cast<int>(cells[static_cast<std::size_t>(a)].size())) break;
          c = 0;
        }
        if (a == dim) break;
      }
      const double bound = (static_cast<double>(r) + 0.5) * hmin;
      if (covers || (heap.size() == k && heap.top().first <= bound * bound) || r > reach_all) break;
    }
    std::vector<Cand> nb;
    while (!heap.empty()) {
      nb.push_back(heap.top());
      heap.pop();
    }
    std::sort(nb.begin(), nb.end());
    double wsum = 0.0;
    std::vector<double> acc(d, 0.0);
    for (const auto& [dist2, m] : nb) {
      if (dist2 < 1e-28) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t a = 0; a < d; ++a) acc[a] = state.velocities[m * d + a];
        wsum = 1.0;
        break;
      }
      const double w = 1.0 / dist2;
      wsum += w;
      for (std::size_t a = 0; a < d; ++a) acc[a] += w * state.velocities[m * d + a];
    }
    for (std::size_t a = 0; a < d; ++a) out[p * d + a] = wsum > 0.0 ? acc[a] / wsum : 0.0;
  }
  return out;
}

WaveFunction ReconstructedWave::wave(std::span<const double> masses, double hbar) const {
  std::vector<cplx> amps(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double s = phase.valid(p) ? phase.values[p] : 0.0;
    amps[p] = std::polar(modulus.values[p], s / hbar);
  }
  return WaveFunction(grid, 1, std::move(amps), std::vector<double>(masses.begin(), masses.end()), hbar);
}

ReconstructedWave reconstruct_wavefunction(const QtmState& state, const Grid& grid, std::size_t gauge_anchor,
                                           const QtmConfig& config) {
  require(grid.dimension() == state.dimension, ErrorKind::domain, "reconstruct: grid dimension mismatch");
  require(gauge_anchor < grid.size(), ErrorKind::domain, "gauge anchor outside the grid");
  double bw = 0.0;
  const auto rho = ensemble_density(state, grid, config, bw);
  const auto mask = node_mask(rho.values, config.reconstruct_floor);
  require(mask[gauge_anchor] != 0, ErrorKind::domain, "gauge anchor lies in the masked low-density region");

  const int dim = grid.dimension();
  const auto d = static_cast<std::size_t>(dim);
  const auto vel = scattered_velocity(state, grid, config.neighbours);

  ReconstructedWave rw{grid, ScalarField{grid, {}, {}}, ScalarField{grid, std::vector<double>(grid.size(), 0.0), mask},
                       gauge_anchor, 0};
  rw.modulus.values.resize(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) rw.modulus.values[p] = std::sqrt(rho.values[p]);

  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::vector<std::size_t> comp_root(grid.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t root = 0; root < grid.size(); ++root) {
    if (!mask[root] || seen[root]) continue;
    ++rw.components_found;
    seen[root] = 1;
    comp_root[root] = root;
    queue.push_back(root);
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      const auto ip = grid.unflatten(p);
      for (int a = 0; a < dim; ++a) {
        const int m = grid.points(a);
        const double mass = state.masses[static_cast<std::size_t>(a / state.dims_per_particle)];
        for (int dir : {-1, 1}) {
          int j = ip[static_cast<std::size_t>(a)] + dir;
          if (grid.periodic()) {
            j = ((j % m) + m) % m;
          } else if (j < 0 || j >= m) {
            continue;
          }
          const auto nq = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) +
                                                   static_cast<std::ptrdiff_t>(j - ip[static_cast<std::size_t>(a)]) *
                                                       static_cast<std::ptrdiff_t>(grid.stride(a)));
          if (!mask[nq] || seen[nq]) continue;
          seen[nq] = 1;
          comp_root[nq] = root;
          const double vbar = 0.5 * (vel[p * d + static_cast<std::size_t>(a)] + vel[nq * d + static_cast<std::size_t>(a)]);
          rw.phase.values[nq] = rw.phase.values[p] + mass * vbar * dir * grid.spacing(a);
          queue.push_back(nq);
        }
      }
    }
  }
  const std::size_t anchor_root = comp_root[gauge_anchor];
  const double shift = rw.phase.values[gauge_anchor];
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (mask[p] && comp_root[p] == anchor_root) rw.phase.values[p] -= shift;
  }
  if (rw.components_found > 1) {
    warn("lagrangian-qtm: unmasked set has " + std::to_string(rw.components_found) +
         " components; each is anchored at its first lattice point");
  }
  return rw;
}

QtmRun qtm_run(const WaveFunction& psi0, const PotentialSpec& v, std::size_t n, double total_time, double dt,
               std::uint64_t seed, const QtmConfig& config, int snapshot_stride) {
  require(dt > 0.0 && total_time >= 0.0, ErrorKind::configuration, "qtm_run: need dt > 0 and T >= 0");
  require(snapshot_stride >= 1, ErrorKind::configuration, "qtm_run: snapshot stride must be >= 1");
  const double ratio = total_time / dt;
  const long steps = std::lround(ratio);
  require(std::abs(ratio - static_cast<double>(steps)) <= 1e-9 * std::max(1.0, ratio), ErrorKind::configuration,
          "qtm_run: T must be an integer multiple of dt");
  const Grid& grid = psi0.grid();
  QtmRun run;
  QtmState s = qtm_init(psi0, n, seed);
  auto keep = [&](const QtmState& st) {
    double bw = 0.0;
    const auto rho = ensemble_density(st, grid, config, bw);
    const auto anchor = static_cast<std::size_t>(std::max_element(rho.values.begin(), rho.values.end()) - rho.values.begin());
    run.reconstructions.push_back(reconstruct_wavefunction(st, grid, anchor, config));
    run.states.push_back(st);
  };
  keep(s);
  for (long k = 1; k <= steps; ++k) {
    s = qtm_step(s, v, dt, grid, config);
    s.time = static_cast<double>(k) * dt;
    if (k % snapshot_stride == 0 || k == steps) keep(s);
  }
  return run;
}

}  // namespace bohm
