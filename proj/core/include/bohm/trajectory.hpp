#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "bohm/eulerian.hpp"
#include "bohm/guidance.hpp"

namespace bohm {

enum class TrajectoryFlag : std::uint8_t { ok, node_regularized, left_domain };
std::string_view to_string(TrajectoryFlag f) noexcept;

/// Time-indexed configuration points. Points are stored unwrapped (periodic
/// motion is continuous); the time base is shared across an ensemble.
struct Trajectory {
  std::shared_ptr<const std::vector<double>> times;
  int dimension = 0;
  std::vector<double> points;  // samples × D
  std::vector<TrajectoryFlag> flags;

  std::size_t size() const noexcept { return flags.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dimension), static_cast<std::size_t>(dimension)};
  }
  bool all_ok() const;
};

struct Ensemble {
  std::vector<Trajectory> trajectories;
  std::shared_ptr<const std::vector<double>> times;
  std::uint64_t seed = 0;
  const EvolutionRecord* source = nullptr;

  std::size_t size() const noexcept { return trajectories.size(); }
  /// Index of the recorded time equal to t (1e-9 relative); domain error otherwise.
  std::size_t time_index(double t) const;
};

struct TrajectoryOptions {
  int output_stride = 1;  // record every k-th RK4 step (the final step is always kept)
  Interpolation interpolation = Interpolation::trilinear;
  double node_epsilon = kDefaultNodeEpsilon;
  int threads = 1;  // 0 picks the hardware concurrency
};

/// n draws from |ψ0|², flat n × D. Product states use per-axis inverse CDFs;
/// entangled states use a thinned Metropolis chain. Positions are uniform
/// within the chosen lattice cell.
std::vector<double> sample_initial(const WaveFunction& psi0, std::size_t n, std::uint64_t seed);

/// Lattice densities are treated as products when ρ matches the product of its
/// marginals to 1e-10 (relative to max ρ).
bool is_product_density(const Grid& grid, std::span<const double> rho);

/// Classical RK4 on dQ/dt = v^{ψ_t}(Q) with ψ_t re-stepped from the record.
Trajectory integrate_trajectory(const EvolutionRecord& record, std::span<const double> q0, double dt_traj,
                                const TrajectoryOptions& options = {});

/// Elementwise integrate_trajectory over a flat n × D start list, in order.
Ensemble propagate_ensemble(const EvolutionRecord& record, std::span<const double> q0, double dt_traj,
                            const TrajectoryOptions& options = {});

/// Normalised cell histogram of the ensemble at recorded time t; members that
/// left a box domain are not counted.
ScalarField empirical_density(const Ensemble& ensemble, double t, const Grid& grid);

inline constexpr int kDefaultTvBins = 64;

/// Total-variation distance between the ensemble and |ψ_t|², taken as the
/// largest per-axis marginal distance on at most `bins` bins per axis.
double equivariance_distance(const Ensemble& ensemble, const EvolutionRecord& record, double t,
                             int bins = kDefaultTvBins);

/// Same distance for explicit positions (flat n × D) against a density on `grid`.
double marginal_tv_distance(const Grid& grid, std::span<const double> rho, std::span<const double> positions,
                            int bins = kDefaultTvBins);

}  // namespace bohm
