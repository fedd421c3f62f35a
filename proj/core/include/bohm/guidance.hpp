#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "bohm/wave.hpp"

namespace bohm {

/// j_a = (ħ/m_a) Im(ψ†∂_aψ), point-major with D components. Spinors sum over
/// components.
VectorField probability_current(const WaveFunction& psi);

/// v = j / ψ†ψ on points with density >= node_epsilon · max; other points are
/// masked out and hold zero.
VectorField velocity_field(const WaveFunction& psi, double node_epsilon = kDefaultNodeEpsilon);

enum class Interpolation { trilinear, spectral };
std::string_view to_string(Interpolation i) noexcept;
Interpolation interpolation_from_string(std::string_view name);

/// Immutable velocity evaluator for one snapshot ψ_t. Safe to share between
/// threads.
///
/// Near nodes the denominator is ψ†ψ + ε_abs with ε_abs = node_epsilon · max ρ,
/// so the returned velocity is always finite.
class VelocityProbe {
 public:
  explicit VelocityProbe(const WaveFunction& psi, Interpolation interpolation = Interpolation::trilinear,
                         double node_epsilon = kDefaultNodeEpsilon);

  const Grid& grid() const noexcept { return grid_; }
  Interpolation interpolation() const noexcept { return interpolation_; }
  double node_epsilon() const noexcept { return node_epsilon_; }

  /// Writes v(q) into `out` (D entries) and returns true when the regularised
  /// denominator was involved. Periodic coordinates are wrapped first; points
  /// outside a box grid raise a domain error.
  bool velocity_at(std::span<const double> q, std::span<double> out) const;
  std::vector<double> velocity_at(std::span<const double> q) const;

  /// The regularised lattice field the trilinear path interpolates.
  const VectorField& field() const noexcept { return field_; }

 private:
  bool spectral_velocity(std::span<const double> q, std::span<double> out) const;

  Grid grid_;
  Interpolation interpolation_;
  double node_epsilon_;
  double eps_abs_ = 0.0;
  std::vector<double> hbar_over_m_;  // per axis
  VectorField field_;
  int components_ = 1;
  std::vector<cplx> spectrum_;  // per component FFT of ψ (spectral path only)
};

/// L¹ norm of (ρ_b - ρ_a)/dt + div((j_a + j_b)/2) for two consecutive states.
double continuity_residual(const WaveFunction& a, const WaveFunction& b, double dt);

}  // namespace bohm
