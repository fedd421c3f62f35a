#include "bohm/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "bohm/error.hpp"

namespace bohm {

double wavenumber(const Grid& grid, int axis, int i) {
  const int m = grid.points(axis);
  const int j = i <= m / 2 ? i : i - m;
  return 2.0 * std::numbers::pi * j / grid.extent(axis);
}

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

using PlanKey = std::tuple<std::vector<int>, int>;

std::mutex g_plan_mutex;
std::map<PlanKey, PlanPair>& plan_cache() {
  static std::map<PlanKey, PlanPair> cache;
  return cache;
}

const PlanPair& plans_for(const Grid& grid, int components) {
  PlanKey key{std::vector<int>(grid.points().begin(), grid.points().end()), components};
  std::lock_guard lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int rank = grid.dimension();
  std::vector<int> n(grid.points().begin(), grid.points().end());
  std::vector<cplx> scratch(grid.size() * static_cast<std::size_t>(components));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair pair;
  pair.forward = fftw_plan_many_dft(rank, n.data(), components, buf, nullptr, components, 1, buf, nullptr,
                                    components, 1, FFTW_FORWARD, flags);
  pair.backward = fftw_plan_many_dft(rank, n.data(), components, buf, nullptr, components, 1, buf, nullptr,
                                     components, 1, FFTW_BACKWARD, flags);
  require(pair.forward && pair.backward, ErrorKind::configuration, "FFTW could not create a plan");
  return cache.emplace(std::move(key), pair).first->second;
}

}  // namespace

void fft_forward(const Grid& grid, std::span<cplx> data, int components) {
  const auto& p = plans_for(grid, components);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p.forward, buf, buf);
}

void fft_backward(const Grid& grid, std::span<cplx> data, int components) {
  const auto& p = plans_for(grid, components);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p.backward, buf, buf);
}

namespace {

// Fourth-order centred first and second derivative along one axis, treating
// samples beyond a box wall as zero.
std::vector<cplx> stencil_derivative(const Grid& grid, std::span<const cplx> f, int axis, int order) {
  std::vector<cplx> out(f.size());
  const int m = grid.points(axis);
  const auto stride = static_cast<std::ptrdiff_t>(grid.stride(axis));
  const double h = grid.spacing(axis);
  const bool wrap = grid.periodic();
  for (std::size_t p = 0; p < f.size(); ++p) {
    const int i = static_cast<int>((p / grid.stride(axis)) % static_cast<std::size_t>(m));
    auto at = [&](int off) -> cplx {
      int j = i + off;
      if (wrap) {
        j = ((j % m) + m) % m;
      } else if (j < 0 || j >= m) {
        return cplx{0.0, 0.0};
      }
      return f[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + (j - i) * stride)];
    };
    if (order == 1) {
      out[p] = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
    } else {
      out[p] = (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2)) / (12.0 * h * h);
    }
  }
  return out;
}

}  // namespace

Differentiator::Differentiator(const Grid& grid, std::span<const cplx> f)
    : grid_(grid), spectral_(grid.periodic()), data_(f.begin(), f.end()) {
  require(f.size() == grid.size(), ErrorKind::domain, "Differentiator: sample count does not match grid");
  if (spectral_) fft_forward(grid_, data_);
}

Differentiator::Differentiator(const Grid& grid, std::span<const double> f)
    : grid_(grid), spectral_(grid.periodic()), data_(f.size()) {
  require(f.size() == grid.size(), ErrorKind::domain, "Differentiator: sample count does not match grid");
  for (std::size_t i = 0; i < f.size(); ++i) data_[i] = cplx{f[i], 0.0};
  if (spectral_) fft_forward(grid_, data_);
}

std::vector<cplx> Differentiator::derivative(const DerivativeOrder& order) const {
  const int dim = grid_.dimension();
  if (!spectral_) {
    std::vector<cplx> cur = data_;
    for (int a = 0; a < dim; ++a) {
      int o = order[static_cast<std::size_t>(a)];
      while (o >= 2) {
        cur = stencil_derivative(grid_, cur, a, 2);
        o -= 2;
      }
      if (o == 1) cur = stencil_derivative(grid_, cur, a, 1);
    }
    return cur;
  }
  std::vector<cplx> out(data_.size());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  std::array<std::vector<cplx>, 3> factor;
  for (int a = 0; a < dim; ++a) {
    const int m = grid_.points(a);
    const int o = order[static_cast<std::size_t>(a)];
    auto& fa = factor[static_cast<std::size_t>(a)];
    fa.assign(static_cast<std::size_t>(m), cplx{1.0, 0.0});
    if (o == 0) continue;
    for (int i = 0; i < m; ++i) {
      const double k = wavenumber(grid_, a, i);
      cplx ik{0.0, k};
      cplx v{1.0, 0.0};
      for (int r = 0; r < o; ++r) v *= ik;
      if ((o % 2 == 1) && (m % 2 == 0) && i == m / 2) v = 0.0;
      fa[static_cast<std::size_t>(i)] = v;
    }
  }
  for (std::size_t p = 0; p < data_.size(); ++p) {
    cplx f = data_[p] * scale;
    for (int a = 0; a < dim; ++a) {
      const auto i = (p / grid_.stride(a)) % static_cast<std::size_t>(grid_.points(a));
      f *= factor[static_cast<std::size_t>(a)][i];
    }
    out[p] = f;
  }
  fft_backward(grid_, out);
  return out;
}

std::vector<double> Differentiator::derivative_real(const DerivativeOrder& order) const {
  const auto c = derivative(order);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

std::vector<cplx> Differentiator::first(int axis) const {
  DerivativeOrder o{0, 0, 0};
  o[static_cast<std::size_t>(axis)] = 1;
  return derivative(o);
}

std::vector<cplx> Differentiator::second(int axis) const {
  DerivativeOrder o{0, 0, 0};
  o[static_cast<std::size_t>(axis)] = 2;
  return derivative(o);
}

std::vector<double> gradient(const Grid& grid, std::span<const double> f) {
  const auto dim = static_cast<std::size_t>(grid.dimension());
  Differentiator diff(grid, f);
  std::vector<double> out(grid.size() * dim);
  for (std::size_t a = 0; a < dim; ++a) {
    DerivativeOrder o{0, 0, 0};
    o[a] = 1;
    const auto d = diff.derivative_real(o);
    for (std::size_t p = 0; p < grid.size(); ++p) out[p * dim + a] = d[p];
  }
  return out;
}

std::vector<double> divergence(const Grid& grid, std::span<const double> field) {
  const auto dim = static_cast<std::size_t>(grid.dimension());
  require(field.size() == grid.size() * dim, ErrorKind::domain, "divergence: field size mismatch");
  std::vector<double> out(grid.size(), 0.0);
  std::vector<double> comp(grid.size());
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t p = 0; p < grid.size(); ++p) comp[p] = field[p * dim + a];
    DerivativeOrder o{0, 0, 0};
    o[a] = 1;
    const auto d = Differentiator(grid, comp).derivative_real(o);
    for (std::size_t p = 0; p < grid.size(); ++p) out[p] += d[p];
  }
  return out;
}

}  // namespace bohm
