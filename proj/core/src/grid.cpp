#include "bohm/grid.hpp"

#include <cmath>
#include <string>

#include "bohm/error.hpp"

namespace bohm {

std::string_view to_string(Boundary b) noexcept {
  return b == Boundary::periodic ? "periodic" : "box";
}

Boundary boundary_from_string(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "box") return Boundary::box;
  fail(ErrorKind::validation, "unknown boundary '" + std::string(name) + "' (expected periodic or box)");
}

Grid::Grid(int dims_per_particle, int particle_count, std::vector<int> points,
           std::vector<double> extents, Boundary boundary)
    : dims_per_particle_(dims_per_particle),
      particle_count_(particle_count),
      points_(std::move(points)),
      extents_(std::move(extents)),
      boundary_(boundary) {
  require(dims_per_particle_ >= 1, ErrorKind::configuration, "dims_per_particle must be >= 1");
  require(particle_count_ >= 1, ErrorKind::configuration, "particle_count must be >= 1");
  const auto dim = static_cast<std::size_t>(dims_per_particle_) * static_cast<std::size_t>(particle_count_);
  require(points_.size() == dim, ErrorKind::configuration,
          "points list has " + std::to_string(points_.size()) + " entries, expected D = " + std::to_string(dim));
  require(extents_.size() == dim, ErrorKind::configuration,
          "extents list has " + std::to_string(extents_.size()) + " entries, expected D = " + std::to_string(dim));
  require(static_cast<int>(dim) <= kMaxGridDimension, ErrorKind::configuration,
          "configuration dimension " + std::to_string(dim) + " exceeds the gridded cap of 3");
  spacing_.resize(dim);
  strides_.resize(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    require(points_[a] >= 4, ErrorKind::configuration,
            "axis " + std::to_string(a) + " has " + std::to_string(points_[a]) + " points (minimum 4)");
    require(std::isfinite(extents_[a]) && extents_[a] > 0.0, ErrorKind::domain,
            "axis " + std::to_string(a) + " extent must be positive");
    spacing_[a] = extents_[a] / points_[a];
    cell_volume_ *= spacing_[a];
    size_ *= static_cast<std::size_t>(points_[a]);
  }
  std::size_t s = 1;
  for (std::size_t a = dim; a-- > 0;) {
    strides_[a] = s;
    s *= static_cast<std::size_t>(points_[a]);
  }
}

bool Grid::spectral_compatible() const noexcept {
  for (int p : points_) {
    if ((p & (p - 1)) != 0) return false;
  }
  return true;
}

std::vector<double> Grid::point(std::size_t flat) const {
  std::vector<double> q(points_.size());
  point(flat, q);
  return q;
}

void Grid::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = 0; a < points_.size(); ++a) {
    const auto i = static_cast<int>((flat / strides_[a]) % static_cast<std::size_t>(points_[a]));
    out[a] = coordinate(static_cast<int>(a), i);
  }
}

std::size_t Grid::flat_index(std::span<const int> index) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < points_.size(); ++a) {
    flat += static_cast<std::size_t>(index[a]) * strides_[a];
  }
  return flat;
}

std::vector<int> Grid::unflatten(std::size_t flat) const {
  std::vector<int> idx(points_.size());
  for (std::size_t a = 0; a < points_.size(); ++a) {
    idx[a] = static_cast<int>((flat / strides_[a]) % static_cast<std::size_t>(points_[a]));
  }
  return idx;
}

int Grid::cell_of(int axis, double x) const {
  const double h = spacing(axis);
  const int m = points(axis);
  long i = std::lround(std::floor((x - lower(axis)) / h + 0.5));
  if (periodic()) {
    i %= m;
    if (i < 0) i += m;
    return static_cast<int>(i);
  }
  return (i < 0 || i >= m) ? -1 : static_cast<int>(i);
}

double Grid::wrap(int axis, double x) const {
  if (!periodic()) return x;
  const double lo = lower(axis);
  const double len = extent(axis);
  double y = std::fmod(x - lo, len);
  if (y < 0.0) y += len;
  if (y >= len) y = 0.0;
  return lo + y;
}

bool Grid::contains(std::span<const double> q) const {
  for (std::size_t a = 0; a < points_.size(); ++a) {
    if (!std::isfinite(q[a])) return false;
    if (periodic()) continue;
    const int ax = static_cast<int>(a);
    if (q[a] < lower(ax) || q[a] > coordinate(ax, points_[a] - 1)) return false;
  }
  return true;
}

bool Grid::same_shape(const Grid& other) const noexcept {
  return dims_per_particle_ == other.dims_per_particle_ && particle_count_ == other.particle_count_ &&
         points_ == other.points_ && extents_ == other.extents_ && boundary_ == other.boundary_;
}

Grid make_grid(int dims_per_particle, int particle_count, std::vector<int> points,
               std::vector<double> extents, Boundary boundary, bool spectral) {
  Grid grid(dims_per_particle, particle_count, std::move(points), std::move(extents), boundary);
  if (spectral && !grid.spectral_compatible()) {
    fail(ErrorKind::configuration, "spectral stepping requires power-of-two points on every axis");
  }
  return grid;
}

}  // namespace bohm
