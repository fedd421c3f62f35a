#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "bohm/error.hpp"
#include "bohm/measurement.hpp"

using namespace bohm;

namespace {

MeasurementModel idle_model(Rng& rng) {
  MeasurementModel m;
  m.dim_object = 3;
  m.dim_apparatus = 3;
  m.hamiltonian = Matrix::Zero(9, 9);
  m.ready_state = random_state(rng, 3);
  m.sectors = {{0}, {1, 2}};
  m.labels = {0.0, 1.0};
  return m;
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("pade exponential agrees with the eigendecomposition") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = oracle::uniform_int(rng, 2, 24);
    Matrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = {rng.normal(), rng.normal()};
    h = (h + h.adjoint()).eval() * oracle::uniform(rng, 0.1, 5.0);
    const double t = oracle::uniform(rng, 0.1, 3.0);
    const Matrix a = Matrix(h * cplx{0, -t});
    const Matrix u = expm(a);
    CHECK(max_abs(u - unitary_from_hermitian(h, t)) < 1e-10);
    CHECK(max_abs(u * u.adjoint() - Matrix::Identity(n, n)) < 1e-10);
    CHECK(max_abs(unitary_from_hermitian(hamiltonian_for_unitary(u, t), t) - u) < 1e-10);
  }
}

TEST_CASE("idle apparatus leaves the product state alone") {
  Rng rng(1);
  const auto m = idle_model(rng);
  const Vector psi = random_state(rng, 3);
  const Vector out = evolve_model(m, psi);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) CHECK(std::abs(out(x * 3 + y) - psi(x) * m.ready_state(y)) < 1e-14);
  const auto povm = extract_povm(m);
  const double w0 = std::norm(m.ready_state(0));
  CHECK(max_abs(povm.elements[0] - Matrix::Identity(3, 3) * w0) < 1e-12);
  CHECK_FALSE(projective_observable(povm).projective);
}

TEST_CASE("cnot model is a projective measurement") {
  const auto m = cnot_model(1.0, -1.0);
  const auto povm = extract_povm(m);
  const Matrix p0 = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  const Matrix p1 = (Matrix(2, 2) << 0, 0, 0, 1).finished();
  CHECK(max_abs(povm.elements[0] - p0) < 1e-10);
  CHECK(max_abs(povm.elements[1] - p1) < 1e-10);
  const auto proj = projective_observable(povm);
  REQUIRE(proj.projective);
  CHECK(max_abs(proj.observable - Matrix((Matrix(2, 2) << 1, 0, 0, -1).finished())) < 1e-10);

  Vector even(2);
  even << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const Vector out = evolve_model(m, even);
  CHECK(pointer_probability(m, out, 0) == doctest::Approx(0.5).epsilon(1e-12));
  Vector zero(2);
  zero << 1, 0;
  CHECK(pointer_probability(m, evolve_model(m, zero), 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pointer_probability(m, evolve_model(m, zero), 1) < 1e-20);
}

TEST_CASE("weak coupling gives an unsharp POVM") {
  const auto povm = extract_povm(weak_coupling_model(0.2));
  for (const auto& e : povm.elements) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(e);
    CHECK(es.eigenvalues().minCoeff() > 1e-3);
    CHECK(es.eigenvalues().maxCoeff() < 1 - 1e-3);
  }
  CHECK_FALSE(projective_observable(povm).projective);
}

TEST_CASE("random models give valid POVMs that predict the pointer statistics") {
  Rng rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_model(rng, 64);
    CHECK(m.product_dimension() <= 64);
    CHECK(m.exhaustive());
    const auto povm = extract_povm(m);
    const auto d = povm_defects(povm);
    CHECK(d.hermiticity < 1e-10);
    CHECK(d.min_eigenvalue > -1e-10);
    CHECK(d.completeness < 1e-10);
    for (int k = 0; k < 10; ++k) {
      const Vector psi = random_state(rng, m.dim_object);
      const Vector out = evolve_model(m, psi);
      for (std::size_t a = 0; a < povm.elements.size(); ++a) {
        const double born = (psi.adjoint() * povm.elements[a] * psi)(0, 0).real();
        CHECK(std::abs(born - pointer_probability(m, out, a)) < 1e-10);
      }
    }
  }
}

TEST_CASE("evolution is linear") {
  Rng rng(5);
  const auto m = random_model(rng, 32);
  const Vector a = random_state(rng, m.dim_object), b = random_state(rng, m.dim_object);
  const cplx ca{0.3, -0.4}, cb{0.8, 0.1};
  const Vector lhs = evolve_model(m, ca * a + cb * b);
  const Vector rhs = ca * evolve_model(m, a) + cb * evolve_model(m, b);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-sector POVM is the identity") {
  Rng rng(8);
  auto m = idle_model(rng);
  m.sectors = {{0, 1, 2}};
  m.labels = {2.5};
  const auto proj = projective_observable(extract_povm(m));
  REQUIRE(proj.projective);
  CHECK(max_abs(proj.observable - Matrix::Identity(3, 3) * 2.5) < 1e-12);
}

TEST_CASE("model files are validated") {
  const std::string good = R"({"dims": [2, 2],
    "H": [[0,0],[0,0],[0,0],[0,0], [0,0],[0,0],[0,0],[0,0], [0,0],[0,0],[0,0],[0,0], [0,0],[0,0],[0,0],[0,0]],
    "phi": [[1,0],[0,0]], "sectors": [[0],[1]], "labels": [1, -1], "t": 1.0})";
  const auto m = parse_model(good);
  CHECK(m.dim_object == 2);
  CHECK(povm_to_json(extract_povm(m)).find("elements") != std::string::npos);
  auto expect_validation = [](const std::string& text) {
    try {
      parse_model(text);
      FAIL("accepted an invalid model");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::validation);
    }
  };
  expect_validation("{not json");
  expect_validation(R"({"dims": [2, 2], "H": [], "phi": [[1,0],[0,0]], "sectors": [[0],[1]], "labels": [1,-1], "t": 1})");
  std::string non_hermitian = good;
  non_hermitian.replace(non_hermitian.find("[0,0]"), 5, "[0,1]");
  expect_validation(non_hermitian);
  expect_validation(R"({"dims": [2, 2], "H": [], "phi": [[1,0],[0,0]], "sectors": [[0],[1]], "labels": [1,-1], "t": 1, "extra": 0})");
}
