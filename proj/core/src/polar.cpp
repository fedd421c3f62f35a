#include "bohm/polar.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <numbers>

#include "bohm/error.hpp"
#include "bohm/guidance.hpp"
#include "bohm/quantum_potential.hpp"
#include "bohm/spectral.hpp"
#include "json.hpp"

namespace bohm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double x) {
  x = std::remainder(x, kTwoPi);
  return x;
}

std::size_t neighbour(const Grid& g, std::size_t p, int axis, int dir, bool& ok) {
  const int m = g.points(axis);
  const int i = static_cast<int>((p / g.stride(axis)) % static_cast<std::size_t>(m));
  int j = i + dir;
  ok = true;
  if (g.periodic()) {
    j = ((j % m) + m) % m;
  } else if (j < 0 || j >= m) {
    ok = false;
    return p;
  }
  return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) +
                                  static_cast<std::ptrdiff_t>(j - i) * static_cast<std::ptrdiff_t>(g.stride(axis)));
}

}  // namespace

PolarDecomposition polar_decompose(const WaveFunction& psi, std::size_t anchor, double node_epsilon) {
  require(psi.components() == 1, ErrorKind::domain, "polar_decompose needs a scalar wave function");
  const Grid& g = psi.grid();
  require(anchor < g.size(), ErrorKind::domain, "anchor outside the grid");
  const auto rho = density(psi);
  const auto mask = node_mask(rho.values, node_epsilon);
  require(mask[anchor] != 0, ErrorKind::domain, "polar_decompose: anchor lies in the masked node region");
  const double hbar = psi.hbar();

  PolarDecomposition out{ScalarField{g, std::vector<double>(g.size()), {}},
                         PhaseField{ScalarField{g, std::vector<double>(g.size(), 0.0), mask}, {}, anchor, hbar}};
  for (std::size_t p = 0; p < g.size(); ++p) out.modulus.values[p] = std::abs(psi.amplitude(p));

  auto& s = out.phase.s.values;
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::deque<std::size_t> queue{anchor};
  seen[anchor] = 1;
  s[anchor] = hbar * std::arg(psi.amplitude(anchor));
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    const double ap = std::arg(psi.amplitude(p));
    for (int a = 0; a < g.dimension(); ++a) {
      for (int dir : {-1, 1}) {
        bool ok = false;
        const std::size_t q = neighbour(g, p, a, dir, ok);
        if (!ok || !mask[q] || seen[q]) continue;
        seen[q] = 1;
        s[q] = s[p] + hbar * wrap_angle(std::arg(psi.amplitude(q)) - ap);
        queue.push_back(q);
      }
    }
  }
  // unreachable unmasked points are left undefined
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!seen[p]) out.phase.s.mask[p] = 0;
  }

  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!seen[p]) continue;
    for (int a = 0; a < g.dimension(); ++a) {
      bool ok = false;
      const std::size_t q = neighbour(g, p, a, +1, ok);
      if (!ok || !seen[q] || q == p) continue;
      const double step = s[q] - s[p];
      if (std::abs(step) <= std::numbers::pi * hbar) continue;
      const double cont = hbar * wrap_angle(std::arg(psi.amplitude(q)) - std::arg(psi.amplitude(p)));
      const double drop = (cont - step) / (kTwoPi * hbar);
      const long k = std::lround(drop);
      out.phase.branch_jumps.push_back(BranchJump{p, q, a, k, step, std::abs(drop - static_cast<double>(k))});
    }
  }
  return out;
}

WaveFunction recompose(const PolarDecomposition& polar, const WaveFunction& like) {
  const Grid& g = polar.modulus.grid;
  std::vector<cplx> amps(g.size(), 0.0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (polar.phase.s.valid(p)) amps[p] = std::polar(polar.modulus.values[p], polar.phase.s.values[p] / polar.phase.hbar);
  }
  return like.with_amplitudes(std::move(amps));
}

Winding winding_number(const PhaseField& phase, std::span<const std::size_t> loop) {
  require(loop.size() >= 2, ErrorKind::domain, "winding_number: loop needs at least two points");
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const std::size_t p = loop[i];
    const std::size_t q = loop[(i + 1) % loop.size()];
    require(phase.s.valid(p) && phase.s.valid(q), ErrorKind::domain, "winding_number: loop crosses the masked set");
    total += wrap_angle((phase.s.values[q] - phase.s.values[p]) / phase.hbar);
  }
  const double turns = total / kTwoPi;
  Winding w{std::lround(turns), 0.0};
  w.residue = std::abs(turns - static_cast<double>(w.number));
  if (w.residue > 0.05) {
    fail(ErrorKind::inconsistent_phase, "winding_number: loop sum is " + std::to_string(turns) + " turns");
  }
  return w;
}

std::vector<std::size_t> axis_loop(const Grid& grid, int axis, std::size_t through) {
  require(grid.periodic(), ErrorKind::domain, "axis_loop needs a periodic grid");
  require(axis >= 0 && axis < grid.dimension(), ErrorKind::domain, "axis_loop: bad axis");
  const int m = grid.points(axis);
  const auto st = grid.stride(axis);
  const std::size_t base = through - ((through / st) % static_cast<std::size_t>(m)) * st;
  std::vector<std::size_t> loop(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) loop[static_cast<std::size_t>(i)] = base + static_cast<std::size_t>(i) * st;
  return loop;
}

namespace {

// ħ²/2m Σ_a ∂_a²R/R, (∇S)²/2m summed per axis, on the unmasked set.
void spatial_terms(const WaveFunction& psi, const std::vector<std::uint8_t>& mask, std::vector<double>& qterm,
                   std::vector<double>& kinetic) {
  const Grid& g = psi.grid();
  const auto vq = quantum_potential(psi, 1e-300);
  qterm.assign(g.size(), 0.0);
  for (std::size_t p = 0; p < g.size(); ++p) qterm[p] = mask[p] ? -vq.values[p] : 0.0;
  kinetic.assign(g.size(), 0.0);
  std::vector<cplx> f(psi.amplitudes().begin(), psi.amplitudes().end());
  Differentiator diff(g, f);
  for (int a = 0; a < g.dimension(); ++a) {
    const auto d = diff.first(a);
    const double m = psi.mass_of_axis(a);
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (!mask[p]) continue;
      const double gs = psi.hbar() * (d[p] / f[p]).imag();
      kinetic[p] += gs * gs / (2.0 * m);
    }
  }
}

}  // namespace

HamiltonJacobiResiduals hamilton_jacobi_residuals(const WaveFunction& a, const WaveFunction& b,
                                                  const PotentialSpec& v, double dt, double node_epsilon) {
  require(a.components() == 1 && b.components() == 1, ErrorKind::domain, "R/S residuals need scalar states");
  require(a.grid().same_shape(b.grid()), ErrorKind::domain, "R/S residuals: grids differ");
  require(dt > 0.0, ErrorKind::domain, "R/S residuals: dt must be > 0");
  const Grid& g = a.grid();
  const auto ra = density(a);
  const auto rb = density(b);
  const auto ma = node_mask(ra.values, node_epsilon);
  const auto mb = node_mask(rb.values, node_epsilon);
  std::vector<std::uint8_t> mask(g.size());
  std::size_t masked = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    mask[p] = ma[p] && mb[p];
    if (!mask[p]) ++masked;
  }
  HamiltonJacobiResiduals out;
  out.masked_fraction = static_cast<double>(masked) / static_cast<double>(g.size());
  require(out.masked_fraction <= 0.5, ErrorKind::degenerate_input,
          "R/S residuals: node mask covers more than half of the grid");

  out.continuity = continuity_residual(a, b, dt);

  std::vector<double> qa, ka, qb, kb;
  spatial_terms(a, mask, qa, ka);
  spatial_terms(b, mask, qb, kb);
  const auto vs = v.sample(g);
  double hj = 0.0;
  double e_num = 0.0;
  double e_den = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!mask[p]) continue;
    const double dsdt = a.hbar() * wrap_angle(std::arg(b.amplitude(p)) - std::arg(a.amplitude(p))) / dt;
    const double rest = 0.5 * (ka[p] + kb[p]) + vs[p] - 0.5 * (qa[p] + qb[p]);
    hj += std::abs(dsdt + rest);
    const double w = 0.5 * (ra.values[p] + rb.values[p]);
    e_num -= w * dsdt;
    e_den += w;
  }
  out.hamilton_jacobi = hj * g.cell_volume();
  out.energy = e_den > 0.0 ? e_num / e_den : 0.0;
  return out;
}

void write_jump_ledger(const std::filesystem::path& path, const PhaseField& phase) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& b : phase.branch_jumps) {
    j.push_back({{"index", b.from}, {"to", b.to}, {"axis", b.axis}, {"multiple", b.multiple}});
  }
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorKind::io, "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace bohm
