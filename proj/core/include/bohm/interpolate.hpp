#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "bohm/grid.hpp"

namespace bohm {

/// Corner indices and weights of the multilinear (D ≤ 3, so at most 8
/// corners) interpolation stencil around an off-lattice point.
struct Stencil {
  std::array<std::size_t, 8> index{};
  std::array<double, 8> weight{};
  int count = 0;
};

/// Builds the stencil for q. Periodic axes wrap; box axes require q inside the
/// lattice hull and return false otherwise.
bool multilinear_stencil(const Grid& grid, std::span<const double> q, Stencil& out);

/// Interpolates a point-major field with `components` values per lattice point.
void interpolate(const Stencil& stencil, std::span<const double> field, int components, std::span<double> out);

double interpolate_scalar(const Stencil& stencil, std::span<const double> field);

}  // namespace bohm
