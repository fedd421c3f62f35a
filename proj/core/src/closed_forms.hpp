#pragma once

// Analytic reference solutions the scenarios compare against.

#include <cmath>
#include <complex>
#include <numbers>

namespace bohm::closed {

using cplx = std::complex<double>;

inline double free_width(double t, double sigma0, double m, double hbar) {
  const double spread = hbar * t / (2.0 * m * sigma0);
  return std::sqrt(sigma0 * sigma0 + spread * spread);
}

// Free packet that starts as exp(-(x-c)²/4σ0² + ikx), normalised.
inline cplx free_packet(double x, double t, double c, double sigma0, double k, double m, double hbar) {
  const cplx alpha{1.0, hbar * t / (2.0 * m * sigma0 * sigma0)};
  const double dx = x - c - hbar * k * t / m;
  const cplx pre = std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25) / std::sqrt(alpha);
  return pre * std::exp(-dx * dx / (4.0 * sigma0 * sigma0 * alpha) + cplx{0.0, k * x - hbar * k * k * t / (2.0 * m)});
}

// Guided motion in that packet: a dilation about the moving centre.
inline double free_path(double q0, double t, double c, double sigma0, double k, double m, double hbar) {
  return c + hbar * k * t / m + (q0 - c) * free_width(t, sigma0, m, hbar) / sigma0;
}

// Centred Gaussian of initial width σ0 in V = m ω² x² / 2. Writing the
// exponent as -a x² with b = 2ħa / mω, b(t) = (b0 cos + i sin) / (cos + i b0 sin)
// and the amplitude carries 1 / sqrt(cos + i b0 sin).
inline cplx breathing_packet(double x, double t, double sigma0, double omega, double m, double hbar) {
  const double b0 = hbar / (2.0 * sigma0 * sigma0 * m * omega);
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  const cplx den{c, b0 * s};
  const cplx a = (cplx{b0 * c, s} / den) * (m * omega / (2.0 * hbar));
  return std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25) * std::exp(-a * x * x) / std::sqrt(den);
}

}  // namespace bohm::closed
