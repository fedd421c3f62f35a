#include "bohm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bohm/error.hpp"
#include "bohm/interpolate.hpp"

namespace bohm {

std::string_view to_string(PotentialSpec::Kind kind) noexcept {
  switch (kind) {
    case PotentialSpec::Kind::zero: return "zero";
    case PotentialSpec::Kind::harmonic: return "harmonic";
    case PotentialSpec::Kind::soft_coulomb: return "softcoulomb";
    case PotentialSpec::Kind::linear_gradient: return "linear_gradient";
    case PotentialSpec::Kind::custom_table: return "custom_table";
  }
  return "unknown";
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::harmonic(std::vector<double> omega, std::vector<double> axis_mass) {
  require(omega.size() == axis_mass.size(), ErrorKind::configuration, "harmonic: omega and mass lists differ in length");
  PotentialSpec v;
  v.kind_ = Kind::harmonic;
  v.coeffs_.resize(omega.size());
  for (std::size_t a = 0; a < omega.size(); ++a) {
    require(std::isfinite(omega[a]) && axis_mass[a] > 0.0, ErrorKind::configuration, "harmonic: invalid omega or mass");
    v.coeffs_[a] = axis_mass[a] * omega[a] * omega[a];
  }
  return v;
}

PotentialSpec PotentialSpec::soft_coulomb(std::vector<double> charges, double softening, int dims_per_particle) {
  require(softening > 0.0, ErrorKind::configuration, "softcoulomb: softening must be > 0");
  require(dims_per_particle >= 1, ErrorKind::configuration, "softcoulomb: dims_per_particle must be >= 1");
  PotentialSpec v;
  v.kind_ = Kind::soft_coulomb;
  v.coeffs_ = std::move(charges);
  v.softening_ = softening;
  v.dims_per_particle_ = dims_per_particle;
  return v;
}

PotentialSpec PotentialSpec::linear_gradient(std::vector<double> slopes) {
  PotentialSpec v;
  v.kind_ = Kind::linear_gradient;
  v.coeffs_ = std::move(slopes);
  return v;
}

PotentialSpec PotentialSpec::custom_table(ScalarField table) {
  require(table.values.size() == table.grid.size(), ErrorKind::configuration,
          "custom_table: tabulated values do not match the grid");
  PotentialSpec v;
  v.kind_ = Kind::custom_table;
  v.table_ = std::move(table);
  return v;
}

PotentialSpec PotentialSpec::with_box_wall(BoxWall wall) const {
  require(wall.height > 0.0 && wall.width_cells >= 1, ErrorKind::configuration, "box wall needs height > 0 and width >= 1");
  PotentialSpec v = *this;
  v.wall_ = wall;
  return v;
}

double PotentialSpec::value(std::span<const double> q) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::harmonic: {
      double s = 0.0;
      for (std::size_t a = 0; a < coeffs_.size(); ++a) s += 0.5 * coeffs_[a] * q[a] * q[a];
      return s;
    }
    case Kind::linear_gradient: {
      double s = 0.0;
      for (std::size_t a = 0; a < coeffs_.size(); ++a) s += coeffs_[a] * q[a];
      return s;
    }
    case Kind::soft_coulomb: {
      const auto d = static_cast<std::size_t>(dims_per_particle_);
      const std::size_t n = coeffs_.size();
      const double a2 = softening_ * softening_;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          double r2 = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            const double dx = q[j * d + c] - q[k * d + c];
            r2 += dx * dx;
          }
          s += coeffs_[j] * coeffs_[k] / std::sqrt(r2 + a2);
        }
      }
      return s;
    }
    case Kind::custom_table: {
      Stencil st;
      if (!multilinear_stencil(table_->grid, q, st)) return 0.0;
      return interpolate_scalar(st, table_->values);
    }
  }
  return 0.0;
}

void PotentialSpec::gradient(std::span<const double> q, std::span<double> out) const {
  for (double& g : out) g = 0.0;
  switch (kind_) {
    case Kind::zero:
      return;
    case Kind::harmonic:
      for (std::size_t a = 0; a < coeffs_.size() && a < out.size(); ++a) out[a] = coeffs_[a] * q[a];
      return;
    case Kind::linear_gradient:
      for (std::size_t a = 0; a < coeffs_.size() && a < out.size(); ++a) out[a] = coeffs_[a];
      return;
    case Kind::soft_coulomb: {
      const auto d = static_cast<std::size_t>(dims_per_particle_);
      const std::size_t n = coeffs_.size();
      const double a2 = softening_ * softening_;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          double r2 = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            const double dx = q[j * d + c] - q[k * d + c];
            r2 += dx * dx;
          }
          const double inv3 = 1.0 / std::pow(r2 + a2, 1.5);
          for (std::size_t c = 0; c < d; ++c) {
            const double dx = q[j * d + c] - q[k * d + c];
            const double f = -coeffs_[j] * coeffs_[k] * dx * inv3;
            out[j * d + c] += f;
            out[k * d + c] -= f;
          }
        }
      }
      return;
    }
    case Kind::custom_table: {
      // centred difference of the interpolant at half a lattice spacing
      const Grid& g = table_->grid;
      std::vector<double> qp(q.begin(), q.end());
      for (int a = 0; a < g.dimension(); ++a) {
        const double h = 0.5 * g.spacing(a);
        const auto ua = static_cast<std::size_t>(a);
        qp[ua] = q[ua] + h;
        const double vp = value(qp);
        qp[ua] = q[ua] - h;
        const double vm = value(qp);
        qp[ua] = q[ua];
        out[ua] = (vp - vm) / (2.0 * h);
      }
      return;
    }
  }
}

std::vector<double> PotentialSpec::sample(const Grid& grid) const {
  std::vector<double> v(grid.size(), 0.0);
  if (kind_ == Kind::custom_table) {
    require(table_->grid.same_shape(grid), ErrorKind::configuration, "custom_table: tabulated potential shape does not match grid");
    v = table_->values;
  } else if (kind_ != Kind::zero) {
    std::vector<double> q(static_cast<std::size_t>(grid.dimension()));
    for (std::size_t p = 0; p < grid.size(); ++p) {
      grid.point(p, q);
      v[p] = value(q);
    }
  }
  if (wall_) {
    const int w = wall_->width_cells;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      for (int a = 0; a < grid.dimension(); ++a) {
        const int i = static_cast<int>((p / grid.stride(a)) % static_cast<std::size_t>(grid.points(a)));
        if (i < w || i >= grid.points(a) - w) {
          v[p] += wall_->height;
          break;
        }
      }
    }
  }
  return v;
}

std::vector<double> PotentialSpec::sample_gradient(const Grid& grid) const {
  const auto dim = static_cast<std::size_t>(grid.dimension());
  std::vector<double> g(grid.size() * dim, 0.0);
  if (kind_ == Kind::zero) return g;
  if (kind_ == Kind::custom_table) {
    // fourth-order centred stencil on the table itself
    const auto& t = table_->values;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      for (int a = 0; a < grid.dimension(); ++a) {
        const int m = grid.points(a);
        const int i = static_cast<int>((p / grid.stride(a)) % static_cast<std::size_t>(m));
        auto at = [&](int off) -> double {
          int j = i + off;
          if (grid.periodic()) {
            j = ((j % m) + m) % m;
          } else if (j < 0 || j >= m) {
            j = std::clamp(j, 0, m - 1);
          }
          const auto shift = static_cast<std::ptrdiff_t>(j - i) * static_cast<std::ptrdiff_t>(grid.stride(a));
          return t[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + shift)];
        };
        g[p * dim + static_cast<std::size_t>(a)] =
            (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * grid.spacing(a));
      }
    }
    return g;
  }
  std::vector<double> q(dim);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.point(p, q);
    gradient(q, std::span<double>(g.data() + p * dim, dim));
  }
  return g;
}

}  // namespace bohm
