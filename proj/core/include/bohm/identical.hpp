#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "bohm/trajectory.hpp"

namespace bohm {

enum class Exchange { bosonic, fermionic };
std::string_view to_string(Exchange e) noexcept;

/// True when particle blocks i and j share lattice, extents and mass, so the
/// swap is an exact index permutation.
bool swappable(const WaveFunction& psi, int i, int j);

/// ψ with particles i and j exchanged: coordinates and spin bits.
WaveFunction swap_particles(const WaveFunction& psi, int i, int j);

/// Normalised (ψ + sign · P_ij ψ). Raises zero_norm when the result vanishes.
WaveFunction symmetrize(const WaveFunction& psi, int sign, int i, int j);

/// Normalised Σ_P ε(P) P ψ over all N! particle permutations, with ε = 1 for
/// sign = +1 and ε = parity(P) for sign = -1.
WaveFunction symmetrize_all(const WaveFunction& psi, int sign);

/// Swaps the d-dimensional blocks i and j of a configuration point.
std::vector<double> swap_blocks(std::span<const double> q, int dims_per_particle, int i, int j);

struct ExchangeReport {
  Exchange symmetry = Exchange::bosonic;
  double max_wave_violation = 0.0;      // max |P ψ - sign ψ| / max |ψ| over every pair
  double max_velocity_violation = 0.0;  // velocity units, over unmasked points
  double max_flow_violation = 0.0;      // filled in by flow checks; 0 until then
};

/// Checks v_i(..q_i..q_j..) = v_j(..q_j..q_i..) and v_k invariance for k ∉ {i, j}
/// over every particle pair. The symmetry is the sign that fits ψ best.
ExchangeReport velocity_exchange_check(const WaveFunction& psi, double node_epsilon = kDefaultNodeEpsilon);

/// max_t ‖Q_{swapped start}(t) - swap(Q(t))‖ for the pair (i, j).
double flow_equivariance_check(const EvolutionRecord& record, std::span<const double> q0, int i, int j,
                               double dt_traj, const TrajectoryOptions& options = {});

struct UnorderedPoint {
  std::vector<double> q;      // particle blocks in lexicographic order
  std::vector<int> order;     // original block index of each sorted block
  bool coincident = false;    // two blocks are exactly equal
};

/// Canonical representative of an unordered configuration: stable
/// lexicographic sort of the particle blocks.
UnorderedPoint unordered_view(std::span<const double> q, int dims_per_particle);

/// Smallest |q_1 - q_2| seen along any trajectory of a two-particle d = 1 ensemble.
double min_pair_separation(const Ensemble& ensemble, int dims_per_particle);

}  // namespace bohm
