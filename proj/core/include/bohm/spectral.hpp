#pragma once

#include <array>
#include <span>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/wave.hpp"

namespace bohm {

/// Angular wavenumber of FFT bin i on an axis (standard FFT ordering).
double wavenumber(const Grid& grid, int axis, int i);

/// In-place multidimensional DFT over `components` interleaved fields.
/// Backed by cached FFTW plans created with FFTW_ESTIMATE, so results are
/// bit-reproducible from run to run. `backward` is unnormalised.
void fft_forward(const Grid& grid, std::span<cplx> data, int components = 1);
void fft_backward(const Grid& grid, std::span<cplx> data, int components = 1);

/// Derivative orders per axis, e.g. {0, 2, 0} = ∂²/∂q_1².
using DerivativeOrder = std::array<int, 3>;

/// Differentiates scalar lattice functions. Periodic grids use spectral
/// differentiation (odd orders drop the Nyquist bin); box grids use
/// fourth-order centred stencils with zero extension past the walls.
class Differentiator {
 public:
  Differentiator(const Grid& grid, std::span<const cplx> f);
  Differentiator(const Grid& grid, std::span<const double> f);

  std::vector<cplx> derivative(const DerivativeOrder& order) const;
  std::vector<double> derivative_real(const DerivativeOrder& order) const;

  std::vector<cplx> first(int axis) const;
  std::vector<cplx> second(int axis) const;

  bool spectral() const noexcept { return spectral_; }

 private:
  Grid grid_;
  bool spectral_;
  std::vector<cplx> data_;  // spectrum when spectral_, samples otherwise
};

/// Point-major gradient (D components per point) of a real lattice function.
std::vector<double> gradient(const Grid& grid, std::span<const double> f);

/// Divergence of a point-major vector field with D components.
std::vector<double> divergence(const Grid& grid, std::span<const double> field);

}  // namespace bohm
