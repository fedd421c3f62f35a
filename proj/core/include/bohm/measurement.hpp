#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bohm/random.hpp"
#include "bohm/wave.hpp"

namespace bohm {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest product-space dimension the dense layer accepts.
inline constexpr int kMaxProductDimension = 1 << 12;

/// Object ⊗ apparatus model. Product basis index is x · dim_apparatus + y.
struct MeasurementModel {
  int dim_object = 2;
  int dim_apparatus = 2;
  Matrix hamiltonian;
  Vector ready_state;
  std::vector<std::vector<int>> sectors;  // apparatus basis indices per result
  std::vector<double> labels;
  double duration = 1.0;
  double hbar = 1.0;

  int product_dimension() const noexcept { return dim_object * dim_apparatus; }
  /// True when the sectors cover the whole apparatus basis.
  bool exhaustive() const;
  /// Throws a domain error naming the violated invariant.
  void validate() const;
};

/// e^A by scaling and squaring with a degree-13 Padé approximant.
Matrix expm(const Matrix& a);
/// e^{-iHt/ħ} through the Hermitian eigendecomposition; used to cross-check expm.
Matrix unitary_from_hermitian(const Matrix& h, double t, double hbar = 1.0);

Matrix propagator(const MeasurementModel& model);

/// Ψ_{t1} = e^{-iH(t1-t0)/ħ} (ψ ⊗ φ).
Vector evolve_model(const MeasurementModel& model, const Vector& psi_object);

/// Σ_x Σ_{y ∈ S_α} |Ψ(x, y)|².
double pointer_probability(const MeasurementModel& model, const Vector& state, std::size_t sector);

struct Povm {
  std::vector<Matrix> elements;
  std::vector<double> labels;
};

/// E_α = Σ_{y ∈ S_α} K_y† K_y with (K_y)_{x x'} = Σ_{y'} U_{(x y),(x' y')} φ_{y'}.
Povm extract_povm(const MeasurementModel& model);

struct PovmDefects {
  double hermiticity = 0.0;    // max ‖E - E†‖_max
  double min_eigenvalue = 0.0; // smallest eigenvalue over all elements
  double completeness = 0.0;   // ‖Σ E - I‖_max
};
PovmDefects povm_defects(const Povm& povm);

struct ProjectiveCheck {
  bool projective = false;
  double max_idempotency_defect = 0.0;  // max ‖E² - E‖_F
  Matrix observable;                    // Σ r_α E_α when projective
};
ProjectiveCheck projective_observable(const Povm& povm, double tolerance = 1e-10);

/// H = -(ħ/t) Q diag(arg λ) Q† for a unitary U = Q diag(λ) Q†, so that
/// e^{-iHt/ħ} = U.
Matrix hamiltonian_for_unitary(const Matrix& u, double t, double hbar = 1.0);

/// Controlled flip: pointer qubit flipped when the object is |1⟩; φ = |0⟩,
/// sectors {0}, {1} with labels (r0, r1).
MeasurementModel cnot_model(double r0 = 1.0, double r1 = -1.0);
/// Pointer rotated by π/2 ± θ depending on the object state; non-projective
/// for 0 < θ < π/2.
MeasurementModel weak_coupling_model(double theta);
/// Random Hermitian H, ready state and exhaustive sector partition with
/// product dimension at most `max_dim`.
MeasurementModel random_model(Rng& rng, int max_dim = 64);

/// {dims:[do,da], H:[[re,im],...] row-major, phi:[[re,im],...], sectors, labels, t, hbar?}
MeasurementModel load_model(const std::filesystem::path& path);
MeasurementModel parse_model(const std::string& json_text);
std::string povm_to_json(const Povm& povm);

Vector random_state(Rng& rng, int dim);

}  // namespace bohm
