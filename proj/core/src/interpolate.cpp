#include "bohm/interpolate.hpp"

#include <cmath>

namespace bohm {

bool multilinear_stencil(const Grid& grid, std::span<const double> q, Stencil& out) {
  const int dim = grid.dimension();
  std::array<std::size_t, 3> lo_idx{};
  std::array<std::size_t, 3> hi_idx{};
  std::array<double, 3> frac{};
  for (int a = 0; a < dim; ++a) {
    const double h = grid.spacing(a);
    const int m = grid.points(a);
    double x = q[static_cast<std::size_t>(a)];
    if (!std::isfinite(x)) return false;
    double s = (x - grid.lower(a)) / h;
    long i0 = 0;
    if (grid.periodic()) {
      s = std::fmod(s, static_cast<double>(m));
      if (s < 0.0) s += m;
      i0 = static_cast<long>(std::floor(s));
      if (i0 >= m) i0 = m - 1;
      frac[a] = s - static_cast<double>(i0);
      lo_idx[a] = static_cast<std::size_t>(i0);
      hi_idx[a] = static_cast<std::size_t>((i0 + 1) % m);
    } else {
      if (s < 0.0 || s > m - 1) return false;
      i0 = static_cast<long>(std::floor(s));
      if (i0 >= m - 1) i0 = m - 2;
      frac[a] = s - static_cast<double>(i0);
      lo_idx[a] = static_cast<std::size_t>(i0);
      hi_idx[a] = static_cast<std::size_t>(i0 + 1);
    }
  }
  out.count = 1 << dim;
  for (int c = 0; c < out.count; ++c) {
    std::size_t flat = 0;
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const bool upper = (c >> a) & 1;
      flat += (upper ? hi_idx[a] : lo_idx[a]) * grid.stride(a);
      w *= upper ? frac[a] : 1.0 - frac[a];
    }
    out.index[static_cast<std::size_t>(c)] = flat;
    out.weight[static_cast<std::size_t>(c)] = w;
  }
  return true;
}

void interpolate(const Stencil& stencil, std::span<const double> field, int components, std::span<double> out) {
  const auto nc = static_cast<std::size_t>(components);
  for (std::size_t k = 0; k < nc; ++k) out[k] = 0.0;
  for (int c = 0; c < stencil.count; ++c) {
    const double w = stencil.weight[static_cast<std::size_t>(c)];
    const std::size_t base = stencil.index[static_cast<std::size_t>(c)] * nc;
    for (std::size_t k = 0; k < nc; ++k) out[k] += w * field[base + k];
  }
}

double interpolate_scalar(const Stencil& stencil, std::span<const double> field) {
  double s = 0.0;
  for (int c = 0; c < stencil.count; ++c) {
    s += stencil.weight[static_cast<std::size_t>(c)] * field[stencil.index[static_cast<std::size_t>(c)]];
  }
  return s;
}

}  // namespace bohm
