#pragma once

// Closed-form reference solutions and hand-rolled generators shared by the
// unit and acceptance tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/random.hpp"
#include "bohm/wave.hpp"

namespace oracle {

using cplx = std::complex<double>;

// Free 1-D Gaussian with initial centre c, width σ0 and phase e^{ikx}.
inline cplx free_gaussian(double x, double t, double c, double sigma0, double k, double m = 1.0, double hbar = 1.0) {
  const cplx alpha{1.0, hbar * t / (2.0 * m * sigma0 * sigma0)};
  const double v = hbar * k / m;
  const double dx = x - c - v * t;
  const cplx amp = std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25) / std::sqrt(alpha);
  const cplx arg = -dx * dx / (4.0 * sigma0 * sigma0 * alpha) + cplx{0.0, k * x - hbar * k * k * t / (2.0 * m)};
  return amp * std::exp(arg);
}

inline double free_width(double t, double sigma0, double m = 1.0, double hbar = 1.0) {
  const double s = hbar * t / (2.0 * m * sigma0);
  return std::sqrt(sigma0 * sigma0 + s * s);
}

// Bohmian trajectory of the free Gaussian: scaling flow about the moving centre.
inline double free_trajectory(double q0, double t, double c, double sigma0, double k, double m = 1.0,
                              double hbar = 1.0) {
  return c + hbar * k * t / m + (q0 - c) * free_width(t, sigma0, m, hbar) / sigma0;
}

// Centred Gaussian exp(-a(t) x² + c(t)) in V = ½ m ω² x². With the
// dimensionless width b = 2ħa/(mω), b(t) = (b0 cos ωt + i sin ωt)/(cos ωt + i b0 sin ωt).
inline cplx breathing_gaussian(double x, double t, double sigma0, double omega, double m = 1.0, double hbar = 1.0) {
  const double a0 = 1.0 / (4.0 * sigma0 * sigma0);
  const double b0 = 2.0 * hbar * a0 / (m * omega);
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  const cplx den{c, b0 * s};
  const cplx b = cplx{b0 * c, s} / den;
  const cplx a = b * m * omega / (2.0 * hbar);
  const double norm = std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25);
  // exp(-a x²) times the prefactor 1/sqrt(cos + i b0 sin)
  return norm * std::exp(-a * x * x) / std::sqrt(den);
}

inline std::vector<cplx> sample(const bohm::Grid& g, auto&& f) {
  std::vector<cplx> out(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) out[p] = f(g.point(p));
  return out;
}

// L² distance between lattice amplitudes and a closed form.
inline double l2_error(const bohm::WaveFunction& psi, const std::vector<cplx>& ref) {
  double s = 0.0;
  for (std::size_t p = 0; p < ref.size(); ++p) s += std::norm(psi.amplitude(p) - ref[p]);
  return std::sqrt(s * psi.grid().cell_volume());
}

// Generators for property tests.
inline double uniform(bohm::Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline int uniform_int(bohm::Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace oracle
