#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bohm/grid.hpp"

namespace bohm {

using cplx = std::complex<double>;

/// Density threshold, as a fraction of max density, below which ψ counts as a
/// node. Shared by guidance, quantum potential and polar decomposition.
inline constexpr double kDefaultNodeEpsilon = 1e-6;

/// Complex amplitudes on a grid, one or 2^N spinor components per point.
///
/// Amplitudes are stored point-major: amplitude(p, s) = data[p * C + s].
/// Spin component s is a multi-index over particles with particle 0 in the
/// most significant bit; bit value 0 means "up".
class WaveFunction {
 public:
  WaveFunction(Grid grid, int components, std::vector<cplx> amplitudes,
               std::vector<double> masses, double hbar = 1.0);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }
  cplx amplitude(std::size_t point, int component = 0) const {
    return amplitudes_[point * static_cast<std::size_t>(components_) + static_cast<std::size_t>(component)];
  }
  std::span<const double> masses() const noexcept { return masses_; }
  double mass_of_axis(int axis) const {
    return masses_[static_cast<std::size_t>(grid_.particle_of_axis(axis))];
  }
  double hbar() const noexcept { return hbar_; }

  /// Same grid, masses and hbar with new amplitudes.
  WaveFunction with_amplitudes(std::vector<cplx> amplitudes) const;

 private:
  Grid grid_;
  int components_;
  std::vector<cplx> amplitudes_;
  std::vector<double> masses_;
  double hbar_;
};

/// Real samples on a grid with an optional validity mask (1 = valid).
/// An empty mask means every point is valid.
struct ScalarField {
  Grid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;

  bool valid(std::size_t p) const { return mask.empty() || mask[p] != 0; }
  double masked_fraction() const;
};

/// D real components per point, point-major: values[p * D + a].
struct VectorField {
  Grid grid;
  int components = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;

  bool valid(std::size_t p) const { return mask.empty() || mask[p] != 0; }
  double at(std::size_t p, int a) const {
    return values[p * static_cast<std::size_t>(components) + static_cast<std::size_t>(a)];
  }
};

double norm_squared(const WaveFunction& psi);
WaveFunction normalize(const WaveFunction& psi);

/// <φ|ψ> = Σ_q φ†(q) ψ(q) · cell volume; conjugate-linear in φ.
cplx inner_product(const WaveFunction& phi, const WaveFunction& psi);

/// ψ†ψ at every lattice point (|ψ|² for scalar wave functions).
ScalarField density(const WaveFunction& psi);

/// Lattice points where density >= node_epsilon * max(density).
std::vector<std::uint8_t> node_mask(std::span<const double> density, double node_epsilon);

struct PacketOptions {
  std::vector<double> masses;  // per particle; empty means all 1
  double hbar = 1.0;
  bool strict = false;  // tail-mass violation is an error rather than a warning
};

/// Normalised ψ(q) ∝ exp(-Σ (q_i - c_i)² / 4σ_i²) · exp(i k·q); σ_i is the
/// standard deviation of |ψ|² along axis i.
WaveFunction gaussian_packet(const Grid& grid, std::span<const double> center,
                             std::span<const double> width, std::span<const double> wavevector,
                             const PacketOptions& options = {});

/// Probability mass of the packet's |ψ|² lying outside the grid (box) or
/// further than half the extent from the centre (periodic), summed over axes.
double packet_tail_mass(const Grid& grid, std::span<const double> center, std::span<const double> width);

/// Spinor wave function from a scalar spatial profile and a fixed spin vector:
/// ψ_s(q) = chi[s] · φ(q).
WaveFunction with_spin(const WaveFunction& spatial, std::span<const cplx> chi);

/// Pointwise L² distance ‖φ - ψ‖ over the grid.
double l2_distance(const WaveFunction& a, const WaveFunction& b);
/// min_θ ‖a e^{iθ} - b‖.
double l2_distance_phase_aligned(const WaveFunction& a, const WaveFunction& b);
/// ‖|a| - |b|‖ using the spinor modulus sqrt(ψ†ψ).
double l2_modulus_distance(const WaveFunction& a, const WaveFunction& b);

}  // namespace bohm
