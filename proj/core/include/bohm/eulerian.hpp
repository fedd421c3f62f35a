#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/potential.hpp"
#include "bohm/wave.hpp"

namespace bohm {

enum class Method { split_spectral, crank_nicolson };

std::string_view to_string(Method m) noexcept;
Method method_from_string(std::string_view name);

/// External magnetic data for the Pauli equation.
///
/// Units: hbar-based Gaussian-style units in which the minimal coupling reads
/// (∇ - i e A)² with no explicit 1/(hbar c); the Zeeman term is μ_k B(q_k)·σ_k.
struct MagneticSpec {
  using FieldFn = std::function<std::array<double, 3>(std::span<const double> particle_position)>;

  FieldFn field;                         // B at one particle's d-dimensional position
  std::vector<double> vector_potential;  // uniform A (d entries); empty means A = 0
  std::vector<double> moments;            // μ_k per particle
  std::vector<double> charges;            // e_k per particle; empty means all zero

  static MagneticSpec uniform(std::array<double, 3> b, std::vector<double> moments);
  /// B(q) = b0 + Σ_c q_c g_c over the particle's d coordinates.
  static MagneticSpec affine(std::array<double, 3> b0, std::vector<std::array<double, 3>> gradient,
                             std::vector<double> moments);
};

struct SolverConfig {
  Method method = Method::split_spectral;
  double dt = 1e-3;
  PotentialSpec potential = PotentialSpec::zero();
  std::optional<MagneticSpec> magnetic;
};

/// dt bound used as the default step: 0.1 · m h² / (hbar π²) over all axes.
double default_time_step(const Grid& grid, std::span<const double> masses, double hbar);

/// Owns the working buffers and cached phase factors for one grid and
/// component count. Not shareable between threads; build one per worker.
class Propagator {
 public:
  Propagator(const Grid& grid, int components, std::span<const double> masses, double hbar, SolverConfig config);
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) noexcept;
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  /// Advances the amplitudes in place by dt (any dt > 0).
  void step(std::vector<cplx>& amplitudes, double dt);
  WaveFunction step(const WaveFunction& psi, double dt);

  const SolverConfig& config() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One Strang step exp(-iV dt/2ħ) exp(-iT dt/ħ) exp(-iV dt/2ħ); periodic,
/// power-of-two grids (box grids need a confining wall in V).
WaveFunction step_split_spectral(const WaveFunction& psi, const PotentialSpec& v, double dt);
/// One Crank–Nicolson step with second-order Laplacian (Dirichlet walls on box grids).
WaveFunction step_crank_nicolson(const WaveFunction& psi, const PotentialSpec& v, double dt);
/// One Strang step of the Pauli equation: the local factor also carries
/// exp(-i dt/2 Σ μ_k B(q_k)·σ_k / ħ) as a 2×2 exponential per particle.
WaveFunction step_pauli(const WaveFunction& psi, const PotentialSpec& v, const MagneticSpec& mag, double dt);

/// Snapshots of a solver run plus what is needed to re-step between them.
class EvolutionRecord {
 public:
  EvolutionRecord(std::vector<double> times, std::vector<WaveFunction> snapshots, SolverConfig config);

  std::span<const double> times() const noexcept { return times_; }
  const std::vector<WaveFunction>& snapshots() const noexcept { return snapshots_; }
  const WaveFunction& snapshot(std::size_t i) const { return snapshots_[i]; }
  Method method() const noexcept { return config_->method; }
  double dt() const noexcept { return config_->dt; }
  const SolverConfig& config() const noexcept { return *config_; }
  const Grid& grid() const { return snapshots_.front().grid(); }
  double final_time() const { return times_.back(); }

  /// Index of the latest snapshot with time <= t (within 1e-12 relative).
  std::size_t snapshot_at_or_before(double t) const;
  /// Index of the snapshot recorded at t, if one exists.
  std::optional<std::size_t> find_snapshot(double t) const;

  /// ψ_t obtained by re-stepping the solver from the nearest earlier snapshot.
  WaveFunction state_at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<WaveFunction> snapshots_;
  std::shared_ptr<const SolverConfig> config_;
};

/// Runs T / dt steps (T must be an integer multiple of dt) and keeps every
/// `snapshot_stride`-th state, always including t = 0 and t = T.
/// Throws numerical_instability when the norm drifts by more than 1e-6.
EvolutionRecord evolve(const WaveFunction& psi0, const SolverConfig& config, double total_time, int snapshot_stride);

/// Walks forward through a record, re-stepping from snapshots as needed.
/// Requests must be non-decreasing in time.
class StateCursor {
 public:
  explicit StateCursor(const EvolutionRecord& record);
  ~StateCursor();
  StateCursor(StateCursor&&) noexcept;
  StateCursor& operator=(StateCursor&&) noexcept;

  const WaveFunction& at(double t);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Complex conjugate of ψ (time reversal for real V).
WaveFunction conjugate(const WaveFunction& psi);

}  // namespace bohm
