#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/wave.hpp"

namespace bohm {

/// High potential shell that turns a periodic lattice into a box.
struct BoxWall {
  double height = 1e4;
  int width_cells = 4;
};

class PotentialSpec {
 public:
  enum class Kind { zero, harmonic, soft_coulomb, linear_gradient, custom_table };

  static PotentialSpec zero();
  /// V = Σ_a ½ m_a ω_a² q_a² with m_a the mass of the particle owning axis a.
  static PotentialSpec harmonic(std::vector<double> omega, std::vector<double> axis_mass);
  /// V = Σ_{j<k} e_j e_k / sqrt(|q_j - q_k|² + a²) over d-dimensional particle blocks.
  static PotentialSpec soft_coulomb(std::vector<double> charges, double softening, int dims_per_particle);
  /// V = Σ_a slope_a q_a.
  static PotentialSpec linear_gradient(std::vector<double> slopes);
  /// Tabulated values; off-lattice reads use multilinear interpolation.
  static PotentialSpec custom_table(ScalarField table);

  PotentialSpec with_box_wall(BoxWall wall) const;

  Kind kind() const noexcept { return kind_; }
  const std::optional<BoxWall>& box_wall() const noexcept { return wall_; }

  /// Smooth part of V (no wall) at an arbitrary point.
  double value(std::span<const double> q) const;
  /// ∇V of the smooth part; `out` has D entries.
  void gradient(std::span<const double> q, std::span<double> out) const;

  /// V at every lattice point including the wall shell.
  std::vector<double> sample(const Grid& grid) const;
  /// ∇V (smooth part) at every lattice point, point-major with D components.
  std::vector<double> sample_gradient(const Grid& grid) const;

  /// True when V is identically zero, wall excluded.
  bool is_zero() const noexcept { return kind_ == Kind::zero; }

 private:
  Kind kind_ = Kind::zero;
  std::vector<double> coeffs_;   // harmonic stiffness m ω², or slopes, or charges
  double softening_ = 0.0;
  int dims_per_particle_ = 1;
  std::optional<ScalarField> table_;
  std::optional<BoxWall> wall_;
};

std::string_view to_string(PotentialSpec::Kind kind) noexcept;

}  // namespace bohm
