#include "bohm/identical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bohm/error.hpp"

namespace bohm {

std::string_view to_string(Exchange e) noexcept { return e == Exchange::bosonic ? "bosonic" : "fermionic"; }

bool swappable(const WaveFunction& psi, int i, int j) {
  const Grid& g = psi.grid();
  const int n = g.particle_count();
  if (i < 0 || j < 0 || i >= n || j >= n) return false;
  if (psi.masses()[static_cast<std::size_t>(i)] != psi.masses()[static_cast<std::size_t>(j)]) return false;
  const int d = g.dims_per_particle();
  for (int c = 0; c < d; ++c) {
    if (g.points(i * d + c) != g.points(j * d + c) || g.extent(i * d + c) != g.extent(j * d + c)) return false;
  }
  return true;
}

namespace {

std::size_t swap_spin(std::size_t s, int n, int i, int j) {
  const std::size_t bi = std::size_t{1} << (n - 1 - i);
  const std::size_t bj = std::size_t{1} << (n - 1 - j);
  const bool vi = (s & bi) != 0;
  const bool vj = (s & bj) != 0;
  if (vi == vj) return s;
  return s ^ bi ^ bj;
}

void require_swappable(const WaveFunction& psi, int i, int j) {
  require(psi.grid().particle_count() >= 2, ErrorKind::domain, "exchange needs N >= 2");
  require(i != j, ErrorKind::domain, "exchange needs two distinct particles");
  require(swappable(psi, i, j), ErrorKind::domain,
          "particles " + std::to_string(i) + " and " + std::to_string(j) +
              " differ in mass or lattice and cannot be exchanged");
}

}  // namespace

WaveFunction swap_particles(const WaveFunction& psi, int i, int j) {
  require_swappable(psi, i, j);
  const Grid& g = psi.grid();
  const int d = g.dims_per_particle();
  const int n = g.particle_count();
  const auto nc = static_cast<std::size_t>(psi.components());
  std::vector<cplx> out(psi.amplitudes().size());
  std::vector<int> idx;
  for (std::size_t p = 0; p < g.size(); ++p) {
    idx = g.unflatten(p);
    for (int c = 0; c < d; ++c) std::swap(idx[static_cast<std::size_t>(i * d + c)], idx[static_cast<std::size_t>(j * d + c)]);
    const std::size_t q = g.flat_index(idx);
    for (std::size_t s = 0; s < nc; ++s) {
      const std::size_t t = nc == 1 ? 0 : swap_spin(s, n, i, j);
      out[q * nc + t] = psi.amplitudes()[p * nc + s];
    }
  }
  return psi.with_amplitudes(std::move(out));
}

WaveFunction symmetrize(const WaveFunction& psi, int sign, int i, int j) {
  require(sign == 1 || sign == -1, ErrorKind::domain, "symmetrize: sign must be +1 or -1");
  const WaveFunction sw = swap_particles(psi, i, j);
  std::vector<cplx> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  for (std::size_t k = 0; k < amps.size(); ++k) amps[k] += static_cast<double>(sign) * sw.amplitudes()[k];
  const WaveFunction out = psi.with_amplitudes(std::move(amps));
  const double n2 = norm_squared(out);
  if (!(n2 > 1e-24 * std::max(norm_squared(psi), 1e-300))) {
    fail(ErrorKind::zero_norm, sign < 0 ? "antisymmetrised wave function vanishes (exchange-symmetric input)"
                                         : "symmetrised wave function vanishes");
  }
  return normalize(out);
}

WaveFunction symmetrize_all(const WaveFunction& psi, int sign) {
  require(sign == 1 || sign == -1, ErrorKind::domain, "symmetrize_all: sign must be +1 or -1");
  const int n = psi.grid().particle_count();
  require(n >= 2, ErrorKind::domain, "symmetrize_all needs N >= 2");
  for (int k = 1; k < n; ++k) require_swappable(psi, 0, k);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<cplx> acc(psi.amplitudes().size(), 0.0);
  do {
    // apply the permutation as a product of transpositions, tracking parity
    WaveFunction cur = psi;
    std::vector<int> where(perm);
    int parity = 1;
    for (int a = 0; a < n; ++a) {
      if (where[static_cast<std::size_t>(a)] == a) continue;
      const auto b = static_cast<int>(std::find(where.begin() + a, where.end(), a) - where.begin());
      std::swap(where[static_cast<std::size_t>(a)], where[static_cast<std::size_t>(b)]);
      cur = swap_particles(cur, a, b);
      parity = -parity;
    }
    const double w = sign < 0 ? static_cast<double>(parity) : 1.0;
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * cur.amplitudes()[k];
  } while (std::next_permutation(perm.begin(), perm.end()));
  const WaveFunction out = psi.with_amplitudes(std::move(acc));
  if (!(norm_squared(out) > 1e-24 * std::max(norm_squared(psi), 1e-300))) {
    fail(ErrorKind::zero_norm, "(anti)symmetrised wave function vanishes");
  }
  return normalize(out);
}

std::vector<double> swap_blocks(std::span<const double> q, int d, int i, int j) {
  std::vector<double> out(q.begin(), q.end());
  for (int c = 0; c < d; ++c) std::swap(out[static_cast<std::size_t>(i * d + c)], out[static_cast<std::size_t>(j * d + c)]);
  return out;
}

ExchangeReport velocity_exchange_check(const WaveFunction& psi, double node_epsilon) {
  const Grid& g = psi.grid();
  const int n = g.particle_count();
  const int d = g.dims_per_particle();
  require(n >= 2, ErrorKind::domain, "exchange check needs N >= 2");
  double peak = 0.0;
  for (const cplx& z : psi.amplitudes()) peak = std::max(peak, std::abs(z));
  require(peak > 0.0, ErrorKind::zero_norm, "exchange check on a vanishing wave function");

  // pick the sign from the first pair, then measure every pair against it
  const WaveFunction s01 = swap_particles(psi, 0, 1);
  double dev_plus = 0.0;
  double dev_minus = 0.0;
  for (std::size_t k = 0; k < psi.amplitudes().size(); ++k) {
    dev_plus = std::max(dev_plus, std::abs(s01.amplitudes()[k] - psi.amplitudes()[k]));
    dev_minus = std::max(dev_minus, std::abs(s01.amplitudes()[k] + psi.amplitudes()[k]));
  }
  ExchangeReport rep;
  rep.symmetry = dev_plus <= dev_minus ? Exchange::bosonic : Exchange::fermionic;
  const double sign = rep.symmetry == Exchange::bosonic ? 1.0 : -1.0;

  const VelocityProbe probe(psi, Interpolation::trilinear, node_epsilon);
  const VectorField& v = probe.field();
  const auto dim = static_cast<std::size_t>(g.dimension());
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const WaveFunction sw = swap_particles(psi, i, j);
      for (std::size_t k = 0; k < psi.amplitudes().size(); ++k) {
        rep.max_wave_violation =
            std::max(rep.max_wave_violation, std::abs(sw.amplitudes()[k] - sign * psi.amplitudes()[k]) / peak);
      }
      for (std::size_t p = 0; p < g.size(); ++p) {
        idx = g.unflatten(p);
        for (int c = 0; c < d; ++c) std::swap(idx[static_cast<std::size_t>(i * d + c)], idx[static_cast<std::size_t>(j * d + c)]);
        const std::size_t q = g.flat_index(idx);
        if (!v.valid(p) || !v.valid(q)) continue;
        for (int k = 0; k < n; ++k) {
          const int partner = k == i ? j : (k == j ? i : k);
          for (int c = 0; c < d; ++c) {
            const double a = v.values[p * dim + static_cast<std::size_t>(k * d + c)];
            const double b = v.values[q * dim + static_cast<std::size_t>(partner * d + c)];
            rep.max_velocity_violation = std::max(rep.max_velocity_violation, std::abs(a - b));
          }
        }
      }
    }
  }
  return rep;
}

double flow_equivariance_check(const EvolutionRecord& record, std::span<const double> q0, int i, int j,
                               double dt_traj, const TrajectoryOptions& options) {
  const int d = record.grid().dims_per_particle();
  std::vector<double> starts(q0.begin(), q0.end());
  const auto swapped = swap_blocks(q0, d, i, j);
  starts.insert(starts.end(), swapped.begin(), swapped.end());
  const Ensemble e = propagate_ensemble(record, starts, dt_traj, options);
  const auto& a = e.trajectories[0];
  const auto& b = e.trajectories[1];
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto sa = swap_blocks(a.point(k), d, i, j);
    const auto pb = b.point(k);
    double s = 0.0;
    for (std::size_t c = 0; c < sa.size(); ++c) s += (sa[c] - pb[c]) * (sa[c] - pb[c]);
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

UnorderedPoint unordered_view(std::span<const double> q, int d) {
  require(d >= 1 && q.size() % static_cast<std::size_t>(d) == 0, ErrorKind::domain,
          "unordered_view: coordinates must hold whole particle blocks");
  const int n = static_cast<int>(q.size()) / d;
  UnorderedPoint out;
  out.order.resize(static_cast<std::size_t>(n));
  std::iota(out.order.begin(), out.order.end(), 0);
  auto block_less = [&](int a, int b) {
    return std::lexicographical_compare(q.begin() + a * d, q.begin() + (a + 1) * d, q.begin() + b * d,
                                        q.begin() + (b + 1) * d);
  };
  std::stable_sort(out.order.begin(), out.order.end(), block_less);
  out.q.reserve(q.size());
  for (int k : out.order) out.q.insert(out.q.end(), q.begin() + k * d, q.begin() + (k + 1) * d);
  for (int k = 1; k < n; ++k) {
    if (std::equal(out.q.begin() + (k - 1) * d, out.q.begin() + k * d, out.q.begin() + k * d)) out.coincident = true;
  }
  return out;
}

double min_pair_separation(const Ensemble& ensemble, int d) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& tr : ensemble.trajectories) {
    require(tr.dimension == 2 * d, ErrorKind::domain, "min_pair_separation needs two-particle trajectories");
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (tr.flags[k] == TrajectoryFlag::left_domain) continue;
      const auto q = tr.point(k);
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += (q[static_cast<std::size_t>(c)] - q[static_cast<std::size_t>(d + c)]) * (q[static_cast<std::size_t>(c)] - q[static_cast<std::size_t>(d + c)]);
      worst = std::min(worst, std::sqrt(s));
    }
  }
  return worst;
}

}  // namespace bohm
