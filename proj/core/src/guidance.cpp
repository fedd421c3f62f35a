#include "bohm/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bohm/error.hpp"
#include "bohm/interpolate.hpp"
#include "bohm/spectral.hpp"

namespace bohm {

std::string_view to_string(Interpolation i) noexcept {
  return i == Interpolation::trilinear ? "trilinear" : "spectral";
}

Interpolation interpolation_from_string(std::string_view name) {
  if (name == "trilinear") return Interpolation::trilinear;
  if (name == "spectral") return Interpolation::spectral;
  fail(ErrorKind::validation, "unknown interpolation '" + std::string(name) + "'");
}

namespace {

// Im(ψ†∂_aψ) per point and axis, point-major, without the ħ/m factor.
std::vector<double> current_numerator(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  const auto dim = static_cast<std::size_t>(g.dimension());
  const auto nc = static_cast<std::size_t>(psi.components());
  std::vector<double> out(g.size() * dim, 0.0);
  std::vector<cplx> comp(g.size());
  for (std::size_t s = 0; s < nc; ++s) {
    for (std::size_t p = 0; p < g.size(); ++p) comp[p] = psi.amplitudes()[p * nc + s];
    Differentiator diff(g, comp);
    for (std::size_t a = 0; a < dim; ++a) {
      const auto d = diff.first(static_cast<int>(a));
      for (std::size_t p = 0; p < g.size(); ++p) out[p * dim + a] += (std::conj(comp[p]) * d[p]).imag();
    }
  }
  return out;
}

}  // namespace

VectorField probability_current(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  const int dim = g.dimension();
  VectorField j{g, dim, current_numerator(psi), {}};
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int a = 0; a < dim; ++a) {
      j.values[p * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] *= psi.hbar() / psi.mass_of_axis(a);
    }
  }
  return j;
}

VectorField velocity_field(const WaveFunction& psi, double node_epsilon) {
  VectorField v = probability_current(psi);
  const auto rho = density(psi);
  v.mask = node_mask(rho.values, node_epsilon);
  const auto dim = static_cast<std::size_t>(v.components);
  for (std::size_t p = 0; p < rho.values.size(); ++p) {
    for (std::size_t a = 0; a < dim; ++a) {
      double& x = v.values[p * dim + a];
      x = v.mask[p] ? x / rho.values[p] : 0.0;
    }
  }
  return v;
}

VelocityProbe::VelocityProbe(const WaveFunction& psi, Interpolation interpolation, double node_epsilon)
    : grid_(psi.grid()),
      interpolation_(interpolation),
      node_epsilon_(node_epsilon),
      field_{psi.grid(), psi.grid().dimension(), current_numerator(psi), {}},
      components_(psi.components()) {
  require(node_epsilon > 0.0 && node_epsilon <= 1e-3, ErrorKind::configuration,
          "node_epsilon must lie in (0, 1e-3]");
  const int dim = grid_.dimension();
  hbar_over_m_.resize(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) hbar_over_m_[static_cast<std::size_t>(a)] = psi.hbar() / psi.mass_of_axis(a);

  const auto rho = density(psi);
  const double peak = *std::max_element(rho.values.begin(), rho.values.end());
  eps_abs_ = node_epsilon * peak;
  field_.mask = node_mask(rho.values, node_epsilon);
  const auto ud = static_cast<std::size_t>(dim);
  for (std::size_t p = 0; p < grid_.size(); ++p) {
    const double denom = field_.mask[p] ? rho.values[p] : rho.values[p] + eps_abs_;
    for (std::size_t a = 0; a < ud; ++a) field_.values[p * ud + a] *= hbar_over_m_[a] / denom;
  }

  if (interpolation_ == Interpolation::spectral) {
    require(grid_.periodic(), ErrorKind::configuration, "spectral interpolation needs a periodic grid");
    spectrum_.assign(psi.amplitudes().begin(), psi.amplitudes().end());
    fft_forward(grid_, spectrum_, components_);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (cplx& z : spectrum_) z *= scale;
  }
}

bool VelocityProbe::velocity_at(std::span<const double> q, std::span<double> out) const {
  const int dim = grid_.dimension();
  require(q.size() == static_cast<std::size_t>(dim) && out.size() == q.size(), ErrorKind::domain,
          "velocity_at: coordinate dimension mismatch");
  if (!grid_.contains(q)) fail(ErrorKind::domain, "velocity_at: point outside the box domain");
  if (interpolation_ == Interpolation::spectral) return spectral_velocity(q, out);
  Stencil st;
  if (!multilinear_stencil(grid_, q, st)) fail(ErrorKind::domain, "velocity_at: point outside the box domain");
  interpolate(st, field_.values, dim, out);
  bool regularized = false;
  for (int c = 0; c < st.count; ++c) {
    if (st.weight[static_cast<std::size_t>(c)] > 0.0 && !field_.mask[st.index[static_cast<std::size_t>(c)]]) {
      regularized = true;
    }
  }
  return regularized;
}

std::vector<double> VelocityProbe::velocity_at(std::span<const double> q) const {
  std::vector<double> v(q.size());
  velocity_at(q, v);
  return v;
}

bool VelocityProbe::spectral_velocity(std::span<const double> q, std::span<double> out) const {
  // Direct Fourier sum; the Nyquist bin is kept as a cosine for values and
  // dropped for first derivatives, matching the lattice differentiator.
  const int dim = grid_.dimension();
  std::array<std::vector<cplx>, 3> e;
  std::array<std::vector<cplx>, 3> de;
  for (int a = 0; a < dim; ++a) {
    const int m = grid_.points(a);
    const double x = grid_.wrap(a, q[static_cast<std::size_t>(a)]) - grid_.lower(a);
    auto& ea = e[static_cast<std::size_t>(a)];
    auto& da = de[static_cast<std::size_t>(a)];
    ea.resize(static_cast<std::size_t>(m));
    da.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double k = wavenumber(grid_, a, i);
      if (m % 2 == 0 && i == m / 2) {
        ea[static_cast<std::size_t>(i)] = std::cos(k * x);
        da[static_cast<std::size_t>(i)] = 0.0;
      } else {
        ea[static_cast<std::size_t>(i)] = std::polar(1.0, k * x);
        da[static_cast<std::size_t>(i)] = cplx{0.0, k} * ea[static_cast<std::size_t>(i)];
      }
    }
  }
  const auto nc = static_cast<std::size_t>(components_);
  std::vector<cplx> val(nc, 0.0);
  std::vector<cplx> grad(nc * static_cast<std::size_t>(dim), 0.0);
  for (std::size_t p = 0; p < grid_.size(); ++p) {
    std::array<std::size_t, 3> idx{};
    cplx base{1.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      idx[static_cast<std::size_t>(a)] = (p / grid_.stride(a)) % static_cast<std::size_t>(grid_.points(a));
      base *= e[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]];
    }
    std::array<cplx, 3> dfac{};
    for (int a = 0; a < dim; ++a) {
      cplx f{1.0, 0.0};
      for (int b = 0; b < dim; ++b) {
        const auto& tbl = (a == b) ? de[static_cast<std::size_t>(b)] : e[static_cast<std::size_t>(b)];
        f *= tbl[idx[static_cast<std::size_t>(b)]];
      }
      dfac[static_cast<std::size_t>(a)] = f;
    }
    for (std::size_t s = 0; s < nc; ++s) {
      const cplx c = spectrum_[p * nc + s];
      val[s] += c * base;
      for (int a = 0; a < dim; ++a) grad[s * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] += c * dfac[static_cast<std::size_t>(a)];
    }
  }
  double rho = 0.0;
  for (std::size_t s = 0; s < nc; ++s) rho += std::norm(val[s]);
  const bool regularized = rho < eps_abs_;
  const double denom = regularized ? rho + eps_abs_ : rho;
  for (int a = 0; a < dim; ++a) {
    double num = 0.0;
    for (std::size_t s = 0; s < nc; ++s) num += (std::conj(val[s]) * grad[s * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)]).imag();
    out[static_cast<std::size_t>(a)] = hbar_over_m_[static_cast<std::size_t>(a)] * num / denom;
  }
  return regularized;
}

double continuity_residual(const WaveFunction& a, const WaveFunction& b, double dt) {
  require(a.grid().same_shape(b.grid()), ErrorKind::domain, "continuity_residual: grids differ");
  require(dt > 0.0, ErrorKind::domain, "continuity_residual: dt must be > 0");
  const auto ra = density(a);
  const auto rb = density(b);
  auto ja = probability_current(a);
  const auto jb = probability_current(b);
  for (std::size_t i = 0; i < ja.values.size(); ++i) ja.values[i] = 0.5 * (ja.values[i] + jb.values[i]);
  const auto div = divergence(a.grid(), ja.values);
  double l1 = 0.0;
  for (std::size_t p = 0; p < div.size(); ++p) l1 += std::abs((rb.values[p] - ra.values[p]) / dt + div[p]);
  return l1 * a.grid().cell_volume();
}

}  // namespace bohm
