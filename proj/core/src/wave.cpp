#include "bohm/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "bohm/error.hpp"

namespace bohm {

WaveFunction::WaveFunction(Grid grid, int components, std::vector<cplx> amplitudes,
                           std::vector<double> masses, double hbar)
    : grid_(std::move(grid)),
      components_(components),
      amplitudes_(std::move(amplitudes)),
      masses_(std::move(masses)),
      hbar_(hbar) {
  const int n = grid_.particle_count();
  require(components_ == 1 || components_ == (1 << n), ErrorKind::domain,
          "component count must be 1 or 2^N = " + std::to_string(1 << n));
  require(amplitudes_.size() == grid_.size() * static_cast<std::size_t>(components_), ErrorKind::domain,
          "amplitude array does not match grid size x components");
  if (masses_.empty()) masses_.assign(static_cast<std::size_t>(n), 1.0);
  require(masses_.size() == static_cast<std::size_t>(n), ErrorKind::domain,
          "expected one mass per particle");
  for (double m : masses_) {
    require(std::isfinite(m) && m > 0.0, ErrorKind::domain, "masses must be positive");
  }
  require(std::isfinite(hbar_) && hbar_ > 0.0, ErrorKind::domain, "hbar must be positive");
  for (const cplx& z : amplitudes_) {
    require(std::isfinite(z.real()) && std::isfinite(z.imag()), ErrorKind::numerical_instability,
            "non-finite amplitude");
  }
}

WaveFunction WaveFunction::with_amplitudes(std::vector<cplx> amplitudes) const {
  return WaveFunction(grid_, components_, std::move(amplitudes), masses_, hbar_);
}

double ScalarField::masked_fraction() const {
  if (mask.empty()) return 0.0;
  const auto masked = std::count(mask.begin(), mask.end(), std::uint8_t{0});
  return static_cast<double>(masked) / static_cast<double>(mask.size());
}

double norm_squared(const WaveFunction& psi) {
  double s = 0.0;
  for (const cplx& z : psi.amplitudes()) s += std::norm(z);
  return s * psi.grid().cell_volume();
}

WaveFunction normalize(const WaveFunction& psi) {
  const double n2 = norm_squared(psi);
  require(n2 > 0.0 && std::isfinite(n2), ErrorKind::zero_norm, "cannot normalise a zero-norm wave function");
  const double scale = 1.0 / std::sqrt(n2);
  std::vector<cplx> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  for (cplx& z : amps) z *= scale;
  return psi.with_amplitudes(std::move(amps));
}

cplx inner_product(const WaveFunction& phi, const WaveFunction& psi) {
  require(phi.grid().same_shape(psi.grid()) && phi.components() == psi.components(), ErrorKind::domain,
          "inner product of wave functions on different grids");
  cplx s{0.0, 0.0};
  const auto a = phi.amplitudes();
  const auto b = psi.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * phi.grid().cell_volume();
}

ScalarField density(const WaveFunction& psi) {
  const std::size_t n = psi.grid().size();
  const auto c = static_cast<std::size_t>(psi.components());
  std::vector<double> rho(n, 0.0);
  const auto amps = psi.amplitudes();
  for (std::size_t p = 0; p < n; ++p) {
    double s = 0.0;
    for (std::size_t k = 0; k < c; ++k) s += std::norm(amps[p * c + k]);
    rho[p] = s;
  }
  return ScalarField{psi.grid(), std::move(rho), {}};
}

std::vector<std::uint8_t> node_mask(std::span<const double> rho, double node_epsilon) {
  const double peak = rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
  const double threshold = node_epsilon * peak;
  std::vector<std::uint8_t> mask(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) mask[i] = rho[i] >= threshold && rho[i] > 0.0 ? 1 : 0;
  return mask;
}

double packet_tail_mass(const Grid& grid, std::span<const double> center, std::span<const double> width) {
  double tail = 0.0;
  for (int a = 0; a < grid.dimension(); ++a) {
    const double s = width[static_cast<std::size_t>(a)] * std::numbers::sqrt2;
    const double c = center[static_cast<std::size_t>(a)];
    if (grid.periodic()) {
      tail += std::erfc(0.5 * grid.extent(a) / s);
    } else {
      const double h = grid.spacing(a);
      const double lo = grid.lower(a) - 0.5 * h;
      const double hi = grid.lower(a) + grid.extent(a) - 0.5 * h;
      tail += 0.5 * std::erfc((c - lo) / s) + 0.5 * std::erfc((hi - c) / s);
    }
  }
  return tail;
}

WaveFunction gaussian_packet(const Grid& grid, std::span<const double> center,
                             std::span<const double> width, std::span<const double> wavevector,
                             const PacketOptions& options) {
  const auto dim = static_cast<std::size_t>(grid.dimension());
  require(center.size() == dim && width.size() == dim && wavevector.size() == dim, ErrorKind::domain,
          "packet parameters must have D entries");
  for (double s : width) require(s > 0.0 && std::isfinite(s), ErrorKind::domain, "packet width must be positive");

  const double tail = packet_tail_mass(grid, center, width);
  if (tail > 1e-8) {
    std::ostringstream msg;
    msg << "gaussian packet tail mass " << tail << " at the grid boundary exceeds 1e-8";
    if (options.strict) fail(ErrorKind::accuracy, msg.str());
    warn(msg.str());
  }

  std::vector<cplx> amps(grid.size());
  std::vector<double> q(dim);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.point(p, q);
    double env = 0.0;
    double phase = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      double dx = q[a] - center[a];
      if (grid.periodic()) {
        // minimum image so a packet near the seam stays a single bump
        const double len = grid.extent(static_cast<int>(a));
        dx -= len * std::round(dx / len);
      }
      env += dx * dx / (4.0 * width[a] * width[a]);
      phase += wavevector[a] * q[a];
    }
    amps[p] = std::exp(-env) * cplx(std::cos(phase), std::sin(phase));
  }
  std::vector<double> masses = options.masses;
  return normalize(WaveFunction(grid, 1, std::move(amps), std::move(masses), options.hbar));
}

WaveFunction with_spin(const WaveFunction& spatial, std::span<const cplx> chi) {
  require(spatial.components() == 1, ErrorKind::domain, "with_spin expects a scalar spatial profile");
  const int c = 1 << spatial.grid().particle_count();
  require(chi.size() == static_cast<std::size_t>(c), ErrorKind::domain, "spin vector must have 2^N entries");
  const std::size_t n = spatial.grid().size();
  std::vector<cplx> amps(n * static_cast<std::size_t>(c));
  for (std::size_t p = 0; p < n; ++p) {
    for (int s = 0; s < c; ++s) amps[p * static_cast<std::size_t>(c) + static_cast<std::size_t>(s)] = chi[static_cast<std::size_t>(s)] * spatial.amplitude(p);
  }
  return WaveFunction(spatial.grid(), c, std::move(amps),
                      std::vector<double>(spatial.masses().begin(), spatial.masses().end()), spatial.hbar());
}

namespace {

void require_compatible(const WaveFunction& a, const WaveFunction& b) {
  require(a.grid().same_shape(b.grid()) && a.components() == b.components(), ErrorKind::domain,
          "wave functions live on different grids");
}

}  // namespace

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  require_compatible(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.amplitudes().size(); ++i) s += std::norm(a.amplitudes()[i] - b.amplitudes()[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

double l2_distance_phase_aligned(const WaveFunction& a, const WaveFunction& b) {
  require_compatible(a, b);
  // minimiser of ‖a e^{iθ} - b‖ is θ = arg<a|b>; evaluate directly to avoid cancellation
  const cplx overlap = inner_product(a, b);
  const cplx rot = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};
  double s = 0.0;
  for (std::size_t i = 0; i < a.amplitudes().size(); ++i) s += std::norm(a.amplitudes()[i] * rot - b.amplitudes()[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

double l2_modulus_distance(const WaveFunction& a, const WaveFunction& b) {
  require_compatible(a, b);
  const auto ra = density(a).values;
  const auto rb = density(b).values;
  double s = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double d = std::sqrt(ra[i]) - std::sqrt(rb[i]);
    s += d * d;
  }
  return std::sqrt(s * a.grid().cell_volume());
}

}  // namespace bohm
