#include "bohm/quantum_potential.hpp"

#include <algorithm>
#include <cmath>

#include "bohm/error.hpp"
#include "bohm/interpolate.hpp"
#include "bohm/spectral.hpp"

namespace bohm {

namespace {

struct ModulusDerivatives {
  std::vector<double> r;
  std::vector<std::uint8_t> mask;
  std::vector<double> lap;  // Σ_a c_a ∂_a²R
};

double coupling(const WaveFunction& psi, int a) {
  return psi.hbar() * psi.hbar() / (2.0 * psi.mass_of_axis(a));
}

std::vector<double> modulus(const WaveFunction& psi, std::vector<std::uint8_t>& mask, double eps) {
  const auto rho = density(psi);
  mask = node_mask(rho.values, eps);
  std::vector<double> r(rho.values.size());
  for (std::size_t p = 0; p < r.size(); ++p) r[p] = std::sqrt(rho.values[p]);
  return r;
}

}  // namespace

ScalarField quantum_potential(const WaveFunction& psi, double node_epsilon) {
  const Grid& g = psi.grid();
  ScalarField out{g, std::vector<double>(g.size(), 0.0), {}};
  const auto r = modulus(psi, out.mask, node_epsilon);
  Differentiator diff(g, r);
  for (int a = 0; a < g.dimension(); ++a) {
    const double c = coupling(psi, a);
    DerivativeOrder o{0, 0, 0};
    o[static_cast<std::size_t>(a)] = 2;
    const auto d2 = diff.derivative_real(o);
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (out.mask[p]) out.values[p] -= c * d2[p] / r[p];
    }
  }
  return out;
}

VectorField quantum_potential_gradient(const WaveFunction& psi, double node_epsilon) {
  const Grid& g = psi.grid();
  const int dim = g.dimension();
  const auto ud = static_cast<std::size_t>(dim);
  VectorField out{g, dim, std::vector<double>(g.size() * ud, 0.0), {}};
  const auto r = modulus(psi, out.mask, node_epsilon);
  Differentiator diff(g, r);
  std::vector<std::vector<double>> d1(ud);
  for (std::size_t b = 0; b < ud; ++b) {
    DerivativeOrder o{0, 0, 0};
    o[b] = 1;
    d1[b] = diff.derivative_real(o);
  }
  for (int a = 0; a < dim; ++a) {
    const double c = coupling(psi, a);
    DerivativeOrder o2{0, 0, 0};
    o2[static_cast<std::size_t>(a)] = 2;
    const auto d2 = diff.derivative_real(o2);
    for (std::size_t b = 0; b < ud; ++b) {
      DerivativeOrder o3 = o2;
      o3[b] += 1;
      const auto d3 = diff.derivative_real(o3);
      for (std::size_t p = 0; p < g.size(); ++p) {
        if (!out.mask[p]) continue;
        out.values[p * ud + b] -= c * (d3[p] / r[p] - d2[p] * d1[b][p] / (r[p] * r[p]));
      }
    }
  }
  return out;
}

ScalarField classicality_indicator(const WaveFunction& psi, double node_epsilon) {
  const auto grad = quantum_potential_gradient(psi, node_epsilon);
  const auto ud = static_cast<std::size_t>(grad.components);
  ScalarField out{grad.grid, std::vector<double>(grad.grid.size(), 0.0), grad.mask};
  for (std::size_t p = 0; p < out.values.size(); ++p) {
    double s = 0.0;
    for (std::size_t a = 0; a < ud; ++a) s += grad.values[p * ud + a] * grad.values[p * ud + a];
    out.values[p] = std::sqrt(s);
  }
  return out;
}

ForceProbe::ForceProbe(const WaveFunction& psi, const PotentialSpec& v, double node_epsilon)
    : qgrad_(quantum_potential_gradient(psi, node_epsilon)), potential_(v) {}

bool ForceProbe::force_at(std::span<const double> q, std::span<double> out) const {
  const Grid& g = qgrad_.grid;
  Stencil st;
  if (!multilinear_stencil(g, q, st)) fail(ErrorKind::domain, "force_at: point outside the box domain");
  interpolate(st, qgrad_.values, qgrad_.components, out);
  bool clean = true;
  for (int c = 0; c < st.count; ++c) {
    if (st.weight[static_cast<std::size_t>(c)] > 0.0 && !qgrad_.valid(st.index[static_cast<std::size_t>(c)])) clean = false;
  }
  std::vector<double> gv(q.size(), 0.0);
  if (!potential_.is_zero()) {
    // closed-form ∇V is evaluated at the wrapped point on periodic grids
    std::vector<double> qw(q.begin(), q.end());
    for (int a = 0; a < g.dimension(); ++a) qw[static_cast<std::size_t>(a)] = g.wrap(a, qw[static_cast<std::size_t>(a)]);
    potential_.gradient(qw, gv);
  }
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = -(out[a] + gv[a]);
  return clean;
}

double NewtonResidualReport::max_residual() const {
  double m = 0.0;
  for (std::size_t i = 0; i < residual_norm.size(); ++i) {
    if (!excluded[i]) m = std::max(m, residual_norm[i]);
  }
  return m;
}

namespace {

void check_uniform(std::span<const double> t) {
  require(t.size() >= 3, ErrorKind::degenerate_input, "newton_residual needs at least 3 samples");
  const double dt = t[1] - t[0];
  for (std::size_t i = 2; i < t.size(); ++i) {
    require(std::abs((t[i] - t[i - 1]) - dt) <= 1e-9 * std::max(1.0, dt), ErrorKind::domain,
            "newton_residual needs a uniform time base");
  }
}

}  // namespace

NewtonResidualReport newton_residual(const Ensemble& ensemble, const EvolutionRecord& record, const PotentialSpec& v,
                                     double node_epsilon) {
  require(ensemble.size() >= 1, ErrorKind::degenerate_input, "empty ensemble");
  const auto& t = *ensemble.times;
  check_uniform(t);
  const double dt = t[1] - t[0];
  const Grid& g = record.grid();
  const auto d = static_cast<std::size_t>(g.dimension());
  std::vector<double> mass(d);
  for (std::size_t a = 0; a < d; ++a) mass[a] = record.snapshot(0).mass_of_axis(static_cast<int>(a));

  NewtonResidualReport rep;
  StateCursor cursor(record);
  std::vector<double> f(d);
  std::size_t excluded = 0;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    ForceProbe probe(cursor.at(t[i]), v, node_epsilon);
    double worst = 0.0;
    bool any_clean = false;
    bool all_clean = true;
    for (const auto& tr : ensemble.trajectories) {
      if (tr.flags[i - 1] == TrajectoryFlag::left_domain || tr.flags[i + 1] == TrajectoryFlag::left_domain) {
        all_clean = false;
        continue;
      }
      const auto qm = tr.point(i - 1);
      const auto q0 = tr.point(i);
      const auto qp = tr.point(i + 1);
      if (!probe.force_at(q0, f)) {
        all_clean = false;
        continue;
      }
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double acc = (qp[a] - 2.0 * q0[a] + qm[a]) / (dt * dt);
        const double r = mass[a] * acc - f[a];
        s += r * r;
      }
      worst = std::max(worst, std::sqrt(s));
      any_clean = true;
    }
    rep.times.push_back(t[i]);
    const bool drop = ensemble.size() == 1 ? !all_clean : !any_clean;
    rep.excluded.push_back(drop ? 1 : 0);
    rep.residual_norm.push_back(drop ? 0.0 : worst);
    if (drop) ++excluded;
  }
  rep.excluded_fraction = static_cast<double>(excluded) / static_cast<double>(rep.times.size());
  require(excluded < rep.times.size(), ErrorKind::degenerate_input, "every newton_residual sample is masked");
  return rep;
}

NewtonResidualReport newton_residual(const Trajectory& trajectory, const EvolutionRecord& record,
                                     const PotentialSpec& v, double node_epsilon) {
  Ensemble e;
  e.times = trajectory.times;
  e.trajectories.push_back(trajectory);
  e.source = &record;
  return newton_residual(e, record, v, node_epsilon);
}

NewtonPath integrate_newton(const EvolutionRecord& record, const PotentialSpec& v, std::span<const double> q0,
                            std::span<const double> v0, double dt, double node_epsilon) {
  const Grid& g = record.grid();
  const auto d = static_cast<std::size_t>(g.dimension());
  require(q0.size() == d && v0.size() == d, ErrorKind::domain, "integrate_newton: start dimension mismatch");
  require(dt > 0.0, ErrorKind::configuration, "integrate_newton: dt must be > 0");
  const double ratio = record.final_time() / dt;
  const long steps = std::lround(ratio);
  require(std::abs(ratio - static_cast<double>(steps)) <= 1e-9 * std::max(1.0, ratio), ErrorKind::configuration,
          "record duration must be an integer multiple of dt");
  std::vector<double> inv_m(d);
  for (std::size_t a = 0; a < d; ++a) inv_m[a] = 1.0 / record.snapshot(0).mass_of_axis(static_cast<int>(a));

  NewtonPath path;
  std::vector<double> y(2 * d);
  std::copy(q0.begin(), q0.end(), y.begin());
  std::copy(v0.begin(), v0.end(), y.begin() + static_cast<std::ptrdiff_t>(d));
  auto store = [&](double t) {
    path.times.push_back(t);
    path.points.insert(path.points.end(), y.begin(), y.begin() + static_cast<std::ptrdiff_t>(d));
    path.velocities.insert(path.velocities.end(), y.begin() + static_cast<std::ptrdiff_t>(d), y.end());
  };
  store(0.0);
  StateCursor cursor(record);
  auto probe_at = [&](double t) { return ForceProbe(cursor.at(t), v, node_epsilon); };
  ForceProbe p0 = probe_at(0.0);
  std::vector<double> f(d);
  auto deriv = [&](const ForceProbe& pr, const std::vector<double>& s, std::vector<double>& k) {
    std::span<const double> q(s.data(), d);
    if (!g.contains(q)) return false;
    if (!pr.force_at(q, f)) path.masked = true;
    for (std::size_t a = 0; a < d; ++a) {
      k[a] = s[d + a];
      k[d + a] = f[a] * inv_m[a];
    }
    return true;
  };
  std::vector<double> k1(2 * d), k2(2 * d), k3(2 * d), k4(2 * d), tmp(2 * d);
  for (long s = 0; s < steps && !path.left_domain; ++s) {
    const double t0 = static_cast<double>(s) * dt;
    ForceProbe ph = probe_at(t0 + 0.5 * dt);
    ForceProbe p1 = probe_at(static_cast<double>(s + 1) * dt);
    bool ok = deriv(p0, y, k1);
    for (std::size_t i = 0; ok && i < 2 * d; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    ok = ok && deriv(ph, tmp, k2);
    for (std::size_t i = 0; ok && i < 2 * d; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    ok = ok && deriv(ph, tmp, k3);
    for (std::size_t i = 0; ok && i < 2 * d; ++i) tmp[i] = y[i] + dt * k3[i];
    ok = ok && deriv(p1, tmp, k4);
    if (!ok) {
      path.left_domain = true;
      break;
    }
    for (std::size_t i = 0; i < 2 * d; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    store(static_cast<double>(s + 1) * dt);
    p0 = std::move(p1);
  }
  return path;
}

}  // namespace bohm
