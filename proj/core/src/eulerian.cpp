#include "bohm/eulerian.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>
#include <string>

#include "bohm/error.hpp"
#include "bohm/spectral.hpp"

namespace bohm {

std::string_view to_string(Method m) noexcept {
  return m == Method::split_spectral ? "split_spectral" : "crank_nicolson";
}

Method method_from_string(std::string_view name) {
  if (name == "split_spectral") return Method::split_spectral;
  if (name == "crank_nicolson") return Method::crank_nicolson;
  fail(ErrorKind::validation, "unknown solver method '" + std::string(name) + "'");
}

MagneticSpec MagneticSpec::uniform(std::array<double, 3> b, std::vector<double> moments) {
  MagneticSpec m;
  m.field = [b](std::span<const double>) { return b; };
  m.moments = std::move(moments);
  return m;
}

MagneticSpec MagneticSpec::affine(std::array<double, 3> b0, std::vector<std::array<double, 3>> gradient,
                                  std::vector<double> moments) {
  MagneticSpec m;
  m.field = [b0, g = std::move(gradient)](std::span<const double> q) {
    std::array<double, 3> b = b0;
    for (std::size_t c = 0; c < g.size() && c < q.size(); ++c) {
      for (int i = 0; i < 3; ++i) b[static_cast<std::size_t>(i)] += q[c] * g[c][static_cast<std::size_t>(i)];
    }
    return b;
  };
  m.moments = std::move(moments);
  return m;
}

double default_time_step(const Grid& grid, std::span<const double> masses, double hbar) {
  double dt = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dimension(); ++a) {
    const double m = masses[static_cast<std::size_t>(grid.particle_of_axis(a))];
    const double h = grid.spacing(a);
    dt = std::min(dt, 0.1 * m * h * h / (hbar * std::numbers::pi * std::numbers::pi));
  }
  return dt;
}

// ---------------------------------------------------------------------------

struct Propagator::Impl {
  Grid grid;
  int components;
  std::vector<double> masses;
  double hbar;
  SolverConfig config;

  std::vector<double> v;                    // sampled potential incl. wall
  std::vector<std::vector<double>> kinetic;  // per axis: ħ (k - eA)² / 2m
  // Zeeman data: per point, per particle, the unit field direction and |μB|
  std::vector<std::array<double, 4>> zeeman;

  struct Cached {
    double dt = -1.0;
    std::vector<cplx> half_potential;  // exp(-i V dt / 2ħ)
    std::vector<cplx> kinetic_phase;   // exp(-i T dt / ħ) in k-space
    std::vector<std::array<cplx, 4>> half_spin;  // per point, per particle 2x2
  };
  Cached primary;
  Cached secondary;

  // Crank–Nicolson
  struct CnCache {
    double dt = -1.0;
    Eigen::SparseMatrix<cplx> rhs;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>> lu;
  };
  CnCache cn;
  Eigen::SparseMatrix<cplx> hamiltonian;

  Impl(const Grid& g, int c, std::span<const double> m, double hb, SolverConfig cfg)
      : grid(g), components(c), masses(m.begin(), m.end()), hbar(hb), config(std::move(cfg)) {
    const int n = grid.particle_count();
    require(masses.size() == static_cast<std::size_t>(n), ErrorKind::domain, "one mass per particle required");
    require(config.dt > 0.0 && std::isfinite(config.dt), ErrorKind::configuration, "solver dt must be > 0");
    if (config.method == Method::split_spectral) {
      require(grid.spectral_compatible(), ErrorKind::configuration,
              "split-step spectral stepping needs power-of-two axes");
      require(grid.periodic() || config.potential.box_wall().has_value(), ErrorKind::configuration,
              "box boundary without a confining wall in the potential");
    }
    v = config.potential.sample(grid);

    const int d = grid.dims_per_particle();
    if (config.magnetic) {
      const auto& mag = *config.magnetic;
      require(components == (1 << n), ErrorKind::domain,
              "Pauli stepping needs 2^N spinor components, got " + std::to_string(components));
      require(mag.moments.size() == static_cast<std::size_t>(n), ErrorKind::configuration,
              "magnetic spec needs one moment per particle");
      require(mag.charges.empty() || mag.charges.size() == static_cast<std::size_t>(n), ErrorKind::configuration,
              "magnetic spec needs one charge per particle");
      require(mag.vector_potential.empty() || mag.vector_potential.size() == static_cast<std::size_t>(d),
              ErrorKind::configuration, "uniform vector potential needs d entries");
      require(static_cast<bool>(mag.field), ErrorKind::configuration, "magnetic spec has no field");
      require(config.method == Method::split_spectral, ErrorKind::configuration,
              "Pauli stepping is only available with split_spectral");
      zeeman.resize(grid.size() * static_cast<std::size_t>(n));
      std::vector<double> q(static_cast<std::size_t>(grid.dimension()));
      for (std::size_t p = 0; p < grid.size(); ++p) {
        grid.point(p, q);
        for (int k = 0; k < n; ++k) {
          const auto b = mag.field(std::span<const double>(q.data() + k * d, static_cast<std::size_t>(d)));
          const double norm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
          std::array<double, 4> z{0.0, 0.0, 1.0, 0.0};
          if (norm > 0.0) z = {b[0] / norm, b[1] / norm, b[2] / norm, mag.moments[static_cast<std::size_t>(k)] * norm};
          for (double x : z) require(std::isfinite(x), ErrorKind::configuration, "non-finite magnetic field");
          zeeman[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = z;
        }
      }
    }

    kinetic.resize(static_cast<std::size_t>(grid.dimension()));
    for (int a = 0; a < grid.dimension(); ++a) {
      const int k = grid.particle_of_axis(a);
      const double m = masses[static_cast<std::size_t>(k)];
      double shift = 0.0;
      if (config.magnetic && !config.magnetic->vector_potential.empty()) {
        const double e = config.magnetic->charges.empty() ? 0.0 : config.magnetic->charges[static_cast<std::size_t>(k)];
        shift = e * config.magnetic->vector_potential[static_cast<std::size_t>(a % d)];
      }
      auto& ka = kinetic[static_cast<std::size_t>(a)];
      ka.resize(static_cast<std::size_t>(grid.points(a)));
      for (int i = 0; i < grid.points(a); ++i) {
        const double kk = wavenumber(grid, a, i) - shift;
        ka[static_cast<std::size_t>(i)] = hbar * kk * kk / (2.0 * m);
      }
    }

    if (config.method == Method::crank_nicolson) build_hamiltonian();
  }

  void build_hamiltonian() {
    const std::size_t n = grid.size();
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(n * static_cast<std::size_t>(1 + 2 * grid.dimension()));
    for (std::size_t p = 0; p < n; ++p) {
      double diag = v[p];
      for (int a = 0; a < grid.dimension(); ++a) {
        const double m = masses[static_cast<std::size_t>(grid.particle_of_axis(a))];
        const double h = grid.spacing(a);
        const double c = hbar * hbar / (2.0 * m * h * h);
        diag += 2.0 * c;
        const int np = grid.points(a);
        const int i = static_cast<int>((p / grid.stride(a)) % static_cast<std::size_t>(np));
        for (int off : {-1, 1}) {
          int j = i + off;
          if (grid.periodic()) {
            j = (j + np) % np;
          } else if (j < 0 || j >= np) {
            continue;
          }
          const auto q = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) +
                                                  static_cast<std::ptrdiff_t>(j - i) * static_cast<std::ptrdiff_t>(grid.stride(a)));
          trips.emplace_back(static_cast<int>(p), static_cast<int>(q), cplx{-c, 0.0});
        }
      }
      trips.emplace_back(static_cast<int>(p), static_cast<int>(p), cplx{diag, 0.0});
    }
    hamiltonian.resize(static_cast<int>(n), static_cast<int>(n));
    hamiltonian.setFromTriplets(trips.begin(), trips.end());
  }

  Cached& cache_for(double dt) {
    if (primary.dt == dt) return primary;
    if (secondary.dt == dt) return secondary;
    // keep the configured step in `primary`; partial steps rotate through `secondary`
    Cached& slot = (dt == config.dt || primary.dt < 0.0) ? primary : secondary;
    slot.dt = dt;
    const std::size_t n = grid.size();
    slot.half_potential.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      const double phi = -v[p] * 0.5 * dt / hbar;
      slot.half_potential[p] = cplx{std::cos(phi), std::sin(phi)};
    }
    slot.kinetic_phase.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      double e = 0.0;
      for (int a = 0; a < grid.dimension(); ++a) {
        const auto i = (p / grid.stride(a)) % static_cast<std::size_t>(grid.points(a));
        e += kinetic[static_cast<std::size_t>(a)][i];
      }
      const double phi = -e * dt;
      // fold the 1/size normalisation of the backward FFT into the phase
      slot.kinetic_phase[p] = cplx{std::cos(phi), std::sin(phi)} / static_cast<double>(n);
    }
    if (!zeeman.empty()) {
      slot.half_spin.resize(zeeman.size());
      for (std::size_t i = 0; i < zeeman.size(); ++i) {
        const auto& z = zeeman[i];
        const double theta = z[3] * 0.5 * dt / hbar;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        // exp(-iθ n·σ) = cos θ I - i sin θ n·σ
        slot.half_spin[i] = {cplx{c, -s * z[2]}, cplx{-s * z[1], -s * z[0]}, cplx{s * z[1], -s * z[0]},
                             cplx{c, s * z[2]}};
      }
    }
    return slot;
  }

  void apply_local(std::vector<cplx>& amps, const Cached& c) const {
    const std::size_t n = grid.size();
    const auto nc = static_cast<std::size_t>(components);
    for (std::size_t p = 0; p < n; ++p) {
      const cplx f = c.half_potential[p];
      for (std::size_t s = 0; s < nc; ++s) amps[p * nc + s] *= f;
    }
    if (c.half_spin.empty()) return;
    const int np = grid.particle_count();
    for (std::size_t p = 0; p < n; ++p) {
      cplx* a = amps.data() + p * nc;
      for (int k = 0; k < np; ++k) {
        const auto& u = c.half_spin[p * static_cast<std::size_t>(np) + static_cast<std::size_t>(k)];
        const std::size_t bit = std::size_t{1} << (np - 1 - k);
        for (std::size_t s = 0; s < nc; ++s) {
          if (s & bit) continue;
          const cplx up = a[s];
          const cplx dn = a[s | bit];
          a[s] = u[0] * up + u[1] * dn;
          a[s | bit] = u[2] * up + u[3] * dn;
        }
      }
    }
  }

  void split_step(std::vector<cplx>& amps, double dt) {
    const Cached& c = cache_for(dt);
    apply_local(amps, c);
    fft_forward(grid, amps, components);
    const auto nc = static_cast<std::size_t>(components);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const cplx f = c.kinetic_phase[p];
      for (std::size_t s = 0; s < nc; ++s) amps[p * nc + s] *= f;
    }
    fft_backward(grid, amps, components);
    apply_local(amps, c);
  }

  void cn_step(std::vector<cplx>& amps, double dt) {
    if (cn.dt != dt) {
      const int n = static_cast<int>(grid.size());
      Eigen::SparseMatrix<cplx> id(n, n);
      id.setIdentity();
      const cplx alpha{0.0, 0.5 * dt / hbar};
      Eigen::SparseMatrix<cplx> lhs = id + alpha * hamiltonian;
      cn.rhs = id - alpha * hamiltonian;
      cn.lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>>();
      cn.lu->compute(lhs);
      require(cn.lu->info() == Eigen::Success, ErrorKind::numerical_instability, "Crank-Nicolson factorisation failed");
      cn.dt = dt;
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    const auto nc = static_cast<std::size_t>(components);
    Eigen::VectorXcd col(n);
    for (std::size_t s = 0; s < nc; ++s) {
      for (Eigen::Index p = 0; p < n; ++p) col[p] = amps[static_cast<std::size_t>(p) * nc + s];
      Eigen::VectorXcd b = cn.rhs * col;
      Eigen::VectorXcd x = cn.lu->solve(b);
      for (Eigen::Index p = 0; p < n; ++p) amps[static_cast<std::size_t>(p) * nc + s] = x[p];
    }
  }
};

Propagator::Propagator(const Grid& grid, int components, std::span<const double> masses, double hbar,
                       SolverConfig config)
    : impl_(std::make_unique<Impl>(grid, components, masses, hbar, std::move(config))) {}
Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

const SolverConfig& Propagator::config() const noexcept { return impl_->config; }

void Propagator::step(std::vector<cplx>& amplitudes, double dt) {
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::configuration, "step dt must be > 0");
  require(amplitudes.size() == impl_->grid.size() * static_cast<std::size_t>(impl_->components), ErrorKind::domain,
          "amplitude buffer does not match the propagator");
  if (impl_->config.method == Method::split_spectral) {
    impl_->split_step(amplitudes, dt);
  } else {
    impl_->cn_step(amplitudes, dt);
  }
}

WaveFunction Propagator::step(const WaveFunction& psi, double dt) {
  std::vector<cplx> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  step(amps, dt);
  return psi.with_amplitudes(std::move(amps));
}

WaveFunction step_split_spectral(const WaveFunction& psi, const PotentialSpec& v, double dt) {
  SolverConfig cfg{Method::split_spectral, dt, v, std::nullopt};
  Propagator prop(psi.grid(), psi.components(), psi.masses(), psi.hbar(), cfg);
  return prop.step(psi, dt);
}

WaveFunction step_crank_nicolson(const WaveFunction& psi, const PotentialSpec& v, double dt) {
  SolverConfig cfg{Method::crank_nicolson, dt, v, std::nullopt};
  Propagator prop(psi.grid(), psi.components(), psi.masses(), psi.hbar(), cfg);
  return prop.step(psi, dt);
}

WaveFunction step_pauli(const WaveFunction& psi, const PotentialSpec& v, const MagneticSpec& mag, double dt) {
  const int expected = 1 << psi.grid().particle_count();
  require(psi.components() == expected, ErrorKind::domain,
          "step_pauli needs a spinor with 2^N = " + std::to_string(expected) + " components");
  SolverConfig cfg{Method::split_spectral, dt, v, mag};
  Propagator prop(psi.grid(), psi.components(), psi.masses(), psi.hbar(), cfg);
  return prop.step(psi, dt);
}

// ---------------------------------------------------------------------------

EvolutionRecord::EvolutionRecord(std::vector<double> times, std::vector<WaveFunction> snapshots, SolverConfig config)
    : times_(std::move(times)),
      snapshots_(std::move(snapshots)),
      config_(std::make_shared<const SolverConfig>(std::move(config))) {
  require(!times_.empty() && times_.size() == snapshots_.size(), ErrorKind::domain,
          "evolution record needs aligned, non-empty times and snapshots");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    require(times_[i] > times_[i - 1], ErrorKind::domain, "evolution record times must increase");
  }
}

namespace {

bool time_close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

std::size_t EvolutionRecord::snapshot_at_or_before(double t) const {
  require(t >= times_.front() - 1e-12 * std::max(1.0, std::abs(t)), ErrorKind::domain,
          "time precedes the evolution record");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] <= t || time_close(times_[i], t)) idx = i;
  }
  return idx;
}

std::optional<std::size_t> EvolutionRecord::find_snapshot(double t) const {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (time_close(times_[i], t)) return i;
  }
  return std::nullopt;
}

WaveFunction EvolutionRecord::state_at(double t) const {
  StateCursor cursor(*this);
  return cursor.at(t);
}

EvolutionRecord evolve(const WaveFunction& psi0, const SolverConfig& config, double total_time, int snapshot_stride) {
  require(total_time >= 0.0 && std::isfinite(total_time), ErrorKind::configuration, "total time must be >= 0");
  require(snapshot_stride >= 1, ErrorKind::configuration, "snapshot stride must be >= 1");
  const double ratio = total_time / config.dt;
  const auto steps = static_cast<long>(std::llround(ratio));
  require(std::abs(ratio - static_cast<double>(steps)) <= 1e-9 * std::max(1.0, ratio), ErrorKind::configuration,
          "total time must be an integer multiple of dt");

  std::vector<double> times{0.0};
  std::vector<WaveFunction> snaps{psi0};
  if (steps == 0) return EvolutionRecord(std::move(times), std::move(snaps), config);

  Propagator prop(psi0.grid(), psi0.components(), psi0.masses(), psi0.hbar(), config);
  std::vector<cplx> amps(psi0.amplitudes().begin(), psi0.amplitudes().end());
  const double norm0 = norm_squared(psi0);
  for (long s = 1; s <= steps; ++s) {
    prop.step(amps, config.dt);
    if (s % snapshot_stride == 0 || s == steps) {
      WaveFunction snap = psi0.with_amplitudes(amps);
      const double drift = std::abs(norm_squared(snap) - norm0);
      if (!(drift <= 1e-6 * norm0)) {
        fail(ErrorKind::numerical_instability,
             "eulerian-solver: norm drift " + std::to_string(drift) + " at step " + std::to_string(s));
      }
      times.push_back(static_cast<double>(s) * config.dt);
      snaps.push_back(std::move(snap));
    }
  }
  return EvolutionRecord(std::move(times), std::move(snaps), config);
}

// ---------------------------------------------------------------------------

struct StateCursor::Impl {
  const EvolutionRecord* record;
  Propagator prop;
  // last state on the solver's own time lattice
  std::vector<cplx> anchor;
  double anchor_time = -1.0;
  std::size_t anchor_snapshot = 0;
  long anchor_steps = 0;  // full solver steps past the snapshot
  std::optional<WaveFunction> result;
  double result_time = -1.0;

  explicit Impl(const EvolutionRecord& r)
      : record(&r),
        prop(r.grid(), r.snapshot(0).components(), r.snapshot(0).masses(), r.snapshot(0).hbar(), r.config()) {}

  void reset_to(std::size_t snap) {
    const auto amps = record->snapshot(snap).amplitudes();
    anchor.assign(amps.begin(), amps.end());
    anchor_snapshot = snap;
    anchor_steps = 0;
    anchor_time = record->times()[snap];
  }

  const WaveFunction& at(double t) {
    if (result && time_close(result_time, t)) return *result;
    const std::size_t snap = record->snapshot_at_or_before(t);
    const double dt = record->dt();
    if (anchor_time < 0.0 || snap != anchor_snapshot || t < anchor_time - 1e-12) reset_to(snap);
    const double t_snap = record->times()[snap];
    const double ratio = (t - t_snap) / dt;
    auto full = static_cast<long>(std::floor(ratio + 1e-9));
    if (full < 0) full = 0;
    while (anchor_steps < full) {
      prop.step(anchor, dt);
      ++anchor_steps;
    }
    anchor_time = t_snap + static_cast<double>(anchor_steps) * dt;
    const double rem = t - anchor_time;
    if (rem > 1e-12 * std::max(1.0, std::abs(t))) {
      std::vector<cplx> tmp = anchor;
      prop.step(tmp, rem);
      result = record->snapshot(0).with_amplitudes(std::move(tmp));
    } else {
      result = record->snapshot(0).with_amplitudes(anchor);
    }
    result_time = t;
    return *result;
  }
};

StateCursor::StateCursor(const EvolutionRecord& record) : impl_(std::make_unique<Impl>(record)) {}
StateCursor::~StateCursor() = default;
StateCursor::StateCursor(StateCursor&&) noexcept = default;
StateCursor& StateCursor::operator=(StateCursor&&) noexcept = default;

const WaveFunction& StateCursor::at(double t) { return impl_->at(t); }

WaveFunction conjugate(const WaveFunction& psi) {
  std::vector<cplx> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  for (cplx& z : amps) z = std::conj(z);
  return psi.with_amplitudes(std::move(amps));
}

}  // namespace bohm
