#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "bohm/potential.hpp"
#include "bohm/wave.hpp"

namespace bohm {

/// A lattice edge across which the unwrapped phase is discontinuous.
/// Crossing from `from` to `to` (the +axis direction) S falls by
/// multiple · 2πħ relative to its continuous continuation; `step` is the raw
/// difference S(to) - S(from).
struct BranchJump {
  std::size_t from = 0;
  std::size_t to = 0;
  int axis = 0;
  long multiple = 0;
  double step = 0.0;
  double quantization_error = 0.0;  // |drop - multiple · 2πħ| / 2πħ
};

struct PhaseField {
  ScalarField s;  // action units; mask marks where S is defined
  std::vector<BranchJump> branch_jumps;
  std::size_t anchor = 0;
  double hbar = 1.0;
};

struct PolarDecomposition {
  ScalarField modulus;
  PhaseField phase;
};

/// R = |ψ| and S unwrapped by breadth-first flood fill from `anchor`, with
/// S(anchor) = ħ arg ψ(anchor). Scalar wave functions only.
PolarDecomposition polar_decompose(const WaveFunction& psi, std::size_t anchor,
                                   double node_epsilon = kDefaultNodeEpsilon);

/// R e^{iS/ħ}, zero on the masked set.
WaveFunction recompose(const PolarDecomposition& polar, const WaveFunction& like);

struct Winding {
  long number = 0;
  double residue = 0.0;  // distance of the raw loop sum from the nearest integer
};

/// (1/2πħ) Σ wrap(ΔS) around a closed lattice loop (consecutive entries are
/// neighbours; the last connects back to the first). Raises
/// inconsistent_phase when the residue exceeds 0.05.
Winding winding_number(const PhaseField& phase, std::span<const std::size_t> loop);

/// The loop along `axis` through lattice point `through` on a periodic grid.
std::vector<std::size_t> axis_loop(const Grid& grid, int axis, std::size_t through);

struct HamiltonJacobiResiduals {
  double continuity = 0.0;  // L¹ of ∂R²/∂t + Σ ∇·(R²∇S/m)
  double hamilton_jacobi = 0.0;  // L¹ of ∂S/∂t + Σ (∇S)²/2m + V - Σ ħ²/2m ∇²R/R
  double energy = 0.0;      // ρ-weighted mean of -∂S/∂t
  double masked_fraction = 0.0;
};

/// Residuals of the real R/S equations between two consecutive states, with
/// spatial terms averaged over both ends. Residual checking only.
HamiltonJacobiResiduals hamilton_jacobi_residuals(const WaveFunction& a, const WaveFunction& b,
                                                  const PotentialSpec& v, double dt,
                                                  double node_epsilon = kDefaultNodeEpsilon);

/// JSON ledger [{index, to, axis, multiple}] next to a grid dump.
void write_jump_ledger(const std::filesystem::path& path, const PhaseField& phase);

}  // namespace bohm
