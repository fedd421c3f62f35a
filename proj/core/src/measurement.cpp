#include "bohm/measurement.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "bohm/error.hpp"
#include "json.hpp"

namespace bohm {

bool MeasurementModel::exhaustive() const {
  std::set<int> seen;
  for (const auto& s : sectors) seen.insert(s.begin(), s.end());
  return static_cast<int>(seen.size()) == dim_apparatus;
}

void MeasurementModel::validate() const {
  require(dim_object >= 2 && dim_apparatus >= 2, ErrorKind::domain, "model dimensions must be >= 2");
  const int n = product_dimension();
  require(n <= kMaxProductDimension, ErrorKind::domain, "product dimension exceeds 2^12");
  require(hamiltonian.rows() == n && hamiltonian.cols() == n, ErrorKind::domain,
          "hamiltonian must be square on the product space");
  require((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, ErrorKind::domain,
          "hamiltonian is not Hermitian within 1e-12");
  require(ready_state.size() == dim_apparatus, ErrorKind::domain, "ready state has the wrong dimension");
  require(std::abs(ready_state.norm() - 1.0) <= 1e-12, ErrorKind::domain, "ready state is not normalised");
  require(!sectors.empty() && sectors.size() == labels.size(), ErrorKind::domain, "one label per sector required");
  std::set<int> seen;
  for (const auto& s : sectors) {
    for (int y : s) {
      require(y >= 0 && y < dim_apparatus, ErrorKind::domain, "sector index outside the apparatus basis");
      require(seen.insert(y).second, ErrorKind::domain, "pointer sectors overlap");
    }
  }
  std::set<double> lab(labels.begin(), labels.end());
  require(lab.size() == labels.size(), ErrorKind::domain, "sector labels must be distinct");
  require(duration >= 0.0 && std::isfinite(duration), ErrorKind::domain, "duration must be >= 0");
  require(hbar > 0.0, ErrorKind::domain, "hbar must be > 0");
}

Matrix expm(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorKind::domain, "expm needs a square matrix");
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Matrix as = a / std::ldexp(1.0, s);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

Matrix unitary_from_hermitian(const Matrix& h, double t, double hbar) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& ev = es.eigenvalues();
  Vector phase(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) phase[i] = std::polar(1.0, -ev[i] * t / hbar);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix propagator(const MeasurementModel& model) {
  const Matrix a = cplx{0.0, -model.duration / model.hbar} * model.hamiltonian;
  return expm(a);
}

Vector evolve_model(const MeasurementModel& model, const Vector& psi_object) {
  require(psi_object.size() == model.dim_object, ErrorKind::domain, "object state has the wrong dimension");
  Vector joint(model.product_dimension());
  for (int x = 0; x < model.dim_object; ++x) {
    for (int y = 0; y < model.dim_apparatus; ++y) joint[x * model.dim_apparatus + y] = psi_object[x] * model.ready_state[y];
  }
  return propagator(model) * joint;
}

double pointer_probability(const MeasurementModel& model, const Vector& state, std::size_t sector) {
  require(sector < model.sectors.size(), ErrorKind::domain, "sector index out of range");
  require(state.size() == model.product_dimension(), ErrorKind::domain, "state has the wrong dimension");
  double p = 0.0;
  for (int x = 0; x < model.dim_object; ++x) {
    for (int y : model.sectors[sector]) p += std::norm(state[x * model.dim_apparatus + y]);
  }
  return p;
}

Povm extract_povm(const MeasurementModel& model) {
  model.validate();
  const Matrix u = propagator(model);
  const int d_o = model.dim_object;
  const int d_a = model.dim_apparatus;
  Povm povm;
  povm.labels = model.labels;
  for (const auto& sector : model.sectors) {
    Matrix e = Matrix::Zero(d_o, d_o);
    for (int y : sector) {
      Matrix k = Matrix::Zero(d_o, d_o);
      for (int x = 0; x < d_o; ++x) {
        for (int xp = 0; xp < d_o; ++xp) {
          cplx acc{0.0, 0.0};
          for (int yp = 0; yp < d_a; ++yp) acc += u(x * d_a + y, xp * d_a + yp) * model.ready_state[yp];
          k(x, xp) = acc;
        }
      }
      e += k.adjoint() * k;
    }
    povm.elements.push_back(std::move(e));
  }
  return povm;
}

PovmDefects povm_defects(const Povm& povm) {
  require(!povm.elements.empty(), ErrorKind::domain, "empty POVM");
  PovmDefects d;
  d.min_eigenvalue = std::numeric_limits<double>::infinity();
  const Eigen::Index n = povm.elements.front().rows();
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& e : povm.elements) {
    d.hermiticity = std::max(d.hermiticity, (e - e.adjoint()).cwiseAbs().maxCoeff());
    const Matrix herm = 0.5 * (e + e.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = std::min(d.min_eigenvalue, es.eigenvalues().minCoeff());
    sum += e;
  }
  d.completeness = (sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  return d;
}

ProjectiveCheck projective_observable(const Povm& povm, double tolerance) {
  ProjectiveCheck c;
  for (const auto& e : povm.elements) c.max_idempotency_defect = std::max(c.max_idempotency_defect, (e * e - e).norm());
  c.projective = c.max_idempotency_defect <= tolerance;
  if (c.projective) {
    const Eigen::Index n = povm.elements.front().rows();
    c.observable = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < povm.elements.size(); ++i) c.observable += povm.labels[i] * povm.elements[i];
  }
  return c;
}

Matrix hamiltonian_for_unitary(const Matrix& u, double t, double hbar) {
  require(t > 0.0, ErrorKind::domain, "model duration must be > 0 to build H from a unitary");
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& q = schur.matrixU();
  const Matrix& tri = schur.matrixT();
  Vector theta(tri.rows());
  for (Eigen::Index i = 0; i < tri.rows(); ++i) theta[i] = std::arg(tri(i, i));
  Matrix h = -(hbar / t) * q * theta.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

namespace {

MeasurementModel qubit_pair(const Matrix& u, double r0, double r1) {
  MeasurementModel m;
  m.dim_object = 2;
  m.dim_apparatus = 2;
  m.duration = 1.0;
  m.hamiltonian = hamiltonian_for_unitary(u, m.duration, m.hbar);
  m.ready_state = Vector::Zero(2);
  m.ready_state[0] = 1.0;
  m.sectors = {{0}, {1}};
  m.labels = {r0, r1};
  return m;
}

Matrix ry(double angle) {
  Matrix r(2, 2);
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  r << c, -s, s, c;
  return r;
}

}  // namespace

MeasurementModel cnot_model(double r0, double r1) {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = 1.0;
  return qubit_pair(u, r0, r1);
}

MeasurementModel weak_coupling_model(double theta) {
  Matrix u = Matrix::Zero(4, 4);
  u.block(0, 0, 2, 2) = ry(0.5 * std::numbers::pi + theta);
  u.block(2, 2, 2, 2) = ry(0.5 * std::numbers::pi - theta);
  return qubit_pair(u, 1.0, -1.0);
}

Vector random_state(Rng& rng, int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = cplx{rng.normal(), rng.normal()};
  return v / v.norm();
}

MeasurementModel random_model(Rng& rng, int max_dim) {
  require(max_dim >= 4, ErrorKind::domain, "random_model needs max_dim >= 4");
  MeasurementModel m;
  const int max_o = std::max(2, std::min(8, max_dim / 2));
  m.dim_object = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_o - 1));
  const int max_a = std::max(2, max_dim / m.dim_object);
  m.dim_apparatus = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_a - 1));
  const int n = m.product_dimension();
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = cplx{rng.normal(), rng.normal()};
  }
  m.hamiltonian = 0.5 * (g + g.adjoint());
  m.ready_state = random_state(rng, m.dim_apparatus);
  m.duration = 0.2 + 2.0 * rng.uniform();
  const int k = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(m.dim_apparatus - 1));
  m.sectors.assign(static_cast<std::size_t>(k), {});
  for (int y = 0; y < m.dim_apparatus; ++y) {
    // the first k basis states seed one sector each, the rest are random
    const int s = y < k ? y : static_cast<int>(rng.next() % static_cast<std::uint64_t>(k));
    m.sectors[static_cast<std::size_t>(s)].push_back(y);
  }
  for (int s = 0; s < k; ++s) m.labels.push_back(static_cast<double>(s));
  return m;
}

namespace {

cplx pair_value(const nlohmann::json& j) {
  require(j.is_array() && j.size() == 2, ErrorKind::validation, "complex entries are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

MeasurementModel parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::validation, std::string("model JSON: ") + e.what());
  }
  MeasurementModel m;
  try {
    const auto& dims = j.at("dims");
    m.dim_object = dims.at(0).get<int>();
    m.dim_apparatus = dims.at(1).get<int>();
    const int n = m.product_dimension();
    const auto& h = j.at("H");
    require(h.is_array() && static_cast<int>(h.size()) == n * n, ErrorKind::validation,
            "model JSON: H must hold dims product squared [re, im] pairs");
    m.hamiltonian.resize(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) m.hamiltonian(r, c) = pair_value(h[static_cast<std::size_t>(r * n + c)]);
    }
    const auto& phi = j.at("phi");
    require(static_cast<int>(phi.size()) == m.dim_apparatus, ErrorKind::validation, "model JSON: phi size");
    m.ready_state.resize(m.dim_apparatus);
    for (int y = 0; y < m.dim_apparatus; ++y) m.ready_state[y] = pair_value(phi[static_cast<std::size_t>(y)]);
    m.sectors = j.at("sectors").get<std::vector<std::vector<int>>>();
    m.labels = j.at("labels").get<std::vector<double>>();
    m.duration = j.at("t").get<double>();
    m.hbar = j.value("hbar", 1.0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::validation, std::string("model JSON: ") + e.what());
  }
  try {
    m.validate();
  } catch (const Error& e) {
    fail(ErrorKind::validation, e.what());
  }
  return m;
}

MeasurementModel load_model(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorKind::io, "cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_model(ss.str());
}

std::string povm_to_json(const Povm& povm) {
  nlohmann::ordered_json j;
  j["labels"] = povm.labels;
  auto elems = nlohmann::ordered_json::array();
  for (const auto& e : povm.elements) {
    auto flat = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < e.rows(); ++r) {
      for (Eigen::Index c = 0; c < e.cols(); ++c) flat.push_back({e(r, c).real(), e(r, c).imag()});
    }
    elems.push_back(std::move(flat));
  }
  j["dim"] = povm.elements.empty() ? 0 : povm.elements.front().rows();
  j["elements"] = std::move(elems);
  return j.dump(2);
}

}  // namespace bohm
