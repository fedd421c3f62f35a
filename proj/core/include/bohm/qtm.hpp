#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bohm/potential.hpp"
#include "bohm/wave.hpp"

namespace bohm {

/// Ensemble state of the Lagrangian quantum-trajectory solver.
struct QtmState {
  std::vector<double> points;      // n × D
  std::vector<double> velocities;  // n × D
  std::vector<double> accelerations;  // cached force/m at `points`; empty until first force evaluation
  double time = 0.0;
  double bandwidth = 0.0;  // KDE bandwidth used for the latest density estimate
  std::vector<double> masses;  // per particle
  double hbar = 1.0;
  int dimension = 1;
  int dims_per_particle = 1;

  std::size_t size() const noexcept { return dimension ? points.size() / static_cast<std::size_t>(dimension) : 0; }
};

struct QtmConfig {
  double bandwidth_scale = 1.0;   // c in h = c σ̂ n^{-1/(D+4)}
  bool variance_preserving = true;  // shrink kernel centres so the estimate keeps the sample variance
  double kernel_cutoff = 8.0;     // kernel truncated beyond this many bandwidths
  double density_floor = 1e-6;    // forces vanish where ρ̂ < floor · max ρ̂
  double force_cap = 1e3;         // |F| above this at > 1% of points is an instability
  double reconstruct_floor = 1e-6;  // S undefined where ρ̂ < floor · max ρ̂
  int neighbours = 8;             // IDW neighbours for velocity reconstruction
  int threads = 1;
};

/// Deviation-based bandwidth σ̂ n^{-1/(D+4)} scaled by `scale`; σ̂ is the
/// geometric mean of the per-axis sample standard deviations.
double default_bandwidth(std::span<const double> points, int dimension, double scale = 1.0);

/// Gaussian KDE of flat n × D points, evaluated on the lattice and normalised
/// to unit integral. Strictly positive.
ScalarField estimate_density(std::span<const double> points, double bandwidth, const Grid& grid,
                             double kernel_cutoff = 8.0);

/// Sampled initial ensemble with guidance-law velocities v^{ψ0}(Q).
QtmState qtm_init(const WaveFunction& psi0, std::size_t n, std::uint64_t seed);

/// One velocity-Verlet step under -∇(V + V_qu[ρ̂]) with ρ̂ the ensemble KDE on `grid`.
QtmState qtm_step(const QtmState& state, const PotentialSpec& v, double dt, const Grid& grid,
                  const QtmConfig& config = {});

struct ReconstructedWave {
  Grid grid;
  ScalarField modulus;  // sqrt(ρ̂)
  ScalarField phase;    // S in action units; mask marks where S is defined
  std::size_t gauge_anchor = 0;
  int components_found = 1;  // connected pieces of the unmasked set

  WaveFunction wave(std::span<const double> masses, double hbar) const;
};

/// ψ̂ = sqrt(ρ̂) e^{iS/ħ}: velocities are spread to the lattice by inverse
/// distance weighting, m·v is integrated over a fixed breadth-first tree of
/// the unmasked set, and S is shifted so S(gauge_anchor) = 0.
ReconstructedWave reconstruct_wavefunction(const QtmState& state, const Grid& grid, std::size_t gauge_anchor,
                                           const QtmConfig& config = {});

/// Inverse-distance-weighted velocity on every lattice point (k nearest members).
std::vector<double> scattered_velocity(const QtmState& state, const Grid& grid, int neighbours);

struct QtmRun {
  std::vector<QtmState> states;
  std::vector<ReconstructedWave> reconstructions;
};

/// qtm_init, then T/dt steps keeping every `snapshot_stride`-th state (always
/// t = 0 and t = T), each reconstructed with the anchor at the peak of ρ̂.
QtmRun qtm_run(const WaveFunction& psi0, const PotentialSpec& v, std::size_t n, double total_time, double dt,
               std::uint64_t seed, const QtmConfig& config = {}, int snapshot_stride = 1);

}  // namespace bohm
