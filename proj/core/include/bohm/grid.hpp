#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bohm {

enum class Boundary { periodic, box };

std::string_view to_string(Boundary b) noexcept;
Boundary boundary_from_string(std::string_view name);

/// Largest configuration dimension the gridded modules accept.
inline constexpr int kMaxGridDimension = 3;

/// Uniform rectangular lattice over configuration space R^D, D = d * N.
///
/// Lattice point i on axis a sits at lower(a) + i * spacing(a), with the
/// lattice centred on the origin: lower(a) = -extent(a) / 2. Each lattice
/// point owns the cell [x - h/2, x + h/2). Storage order is row-major with
/// the last axis fastest.
class Grid {
 public:
  Grid(int dims_per_particle, int particle_count, std::vector<int> points,
       std::vector<double> extents, Boundary boundary);

  int dims_per_particle() const noexcept { return dims_per_particle_; }
  int particle_count() const noexcept { return particle_count_; }
  int dimension() const noexcept { return static_cast<int>(points_.size()); }
  Boundary boundary() const noexcept { return boundary_; }
  bool periodic() const noexcept { return boundary_ == Boundary::periodic; }

  std::span<const int> points() const noexcept { return points_; }
  std::span<const double> extents() const noexcept { return extents_; }
  int points(int axis) const { return points_[static_cast<std::size_t>(axis)]; }
  double extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  double lower(int axis) const { return -0.5 * extent(axis); }
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  /// True when every axis length is a power of two (required by the FFT paths).
  bool spectral_compatible() const noexcept;

  int particle_of_axis(int axis) const noexcept { return axis / dims_per_particle_; }

  double coordinate(int axis, int index) const { return lower(axis) + index * spacing(axis); }
  std::vector<double> point(std::size_t flat) const;
  void point(std::size_t flat, std::span<double> out) const;

  std::size_t flat_index(std::span<const int> index) const;
  std::vector<int> unflatten(std::size_t flat) const;

  /// Nearest lattice point (cell owner) on one axis; wraps for periodic grids.
  /// Returns -1 when the coordinate lies outside a box grid's cells.
  int cell_of(int axis, double x) const;

  /// Maps a coordinate into [lower, lower + extent) on periodic axes.
  double wrap(int axis, double x) const;

  /// Box grids: inside the lattice hull [x_0, x_{M-1}] on every axis.
  /// Periodic grids contain every finite point.
  bool contains(std::span<const double> q) const;

  bool same_shape(const Grid& other) const noexcept;

 private:
  int dims_per_particle_;
  int particle_count_;
  std::vector<int> points_;
  std::vector<double> extents_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  Boundary boundary_;
  double cell_volume_ = 1.0;
  std::size_t size_ = 1;
};

/// Validated grid construction. With `spectral` set, every axis length must be
/// a power of two.
Grid make_grid(int dims_per_particle, int particle_count, std::vector<int> points,
               std::vector<double> extents, Boundary boundary, bool spectral = true);

}  // namespace bohm
