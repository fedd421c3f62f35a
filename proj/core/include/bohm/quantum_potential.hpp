#pragma once

#include <span>
#include <vector>

#include "bohm/eulerian.hpp"
#include "bohm/trajectory.hpp"

namespace bohm {

/// V_qu = -Σ_a (ħ²/2m_a) ∂_a²R / R with R = sqrt(ψ†ψ); masked near nodes.
ScalarField quantum_potential(const WaveFunction& psi, double node_epsilon = kDefaultNodeEpsilon);

/// ∇V_qu on the lattice (D components, point-major), same mask.
VectorField quantum_potential_gradient(const WaveFunction& psi, double node_epsilon = kDefaultNodeEpsilon);

/// ‖∇V_qu‖ pointwise; small values mark the classical regime.
ScalarField classicality_indicator(const WaveFunction& psi, double node_epsilon = kDefaultNodeEpsilon);

/// Total force -∇(V + V_qu^ψ) at off-lattice points. The lattice part is
/// interpolated exactly like VelocityProbe; ∇V is evaluated in closed form.
class ForceProbe {
 public:
  ForceProbe(const WaveFunction& psi, const PotentialSpec& v, double node_epsilon = kDefaultNodeEpsilon);
  /// Returns false when a masked lattice point contributed.
  bool force_at(std::span<const double> q, std::span<double> out) const;
  const Grid& grid() const noexcept { return qgrad_.grid; }

 private:
  VectorField qgrad_;
  PotentialSpec potential_;
};

struct NewtonResidualReport {
  std::vector<double> times;          // interior samples of the trajectory
  std::vector<double> residual_norm;  // ‖m Q̈ + ∇(V + V_qu)‖, 0 where excluded
  std::vector<std::uint8_t> excluded;
  double excluded_fraction = 0.0;

  double max_residual() const;
};

/// Compares m Q̈ (second-order centred differences of the samples) with
/// -∇(V + V_qu) along Q(t). The trajectory's time base must be uniform and a
/// subset of the record's span.
NewtonResidualReport newton_residual(const Trajectory& trajectory, const EvolutionRecord& record,
                                     const PotentialSpec& v, double node_epsilon = kDefaultNodeEpsilon);

/// Worst residual over every member of an ensemble, per time.
NewtonResidualReport newton_residual(const Ensemble& ensemble, const EvolutionRecord& record, const PotentialSpec& v,
                                     double node_epsilon = kDefaultNodeEpsilon);

/// Solution of the second-order law m Q̈ = -∇(V + V_qu) from (q0, v0).
struct NewtonPath {
  std::vector<double> times;
  std::vector<double> points;      // samples × D
  std::vector<double> velocities;  // samples × D
  bool masked = false;             // a masked force sample was used
  bool left_domain = false;
};

/// RK4 on (Q, Q̇) with ψ_t re-stepped from the record; dt must divide the
/// record's duration.
NewtonPath integrate_newton(const EvolutionRecord& record, const PotentialSpec& v, std::span<const double> q0,
                            std::span<const double> v0, double dt, double node_epsilon = kDefaultNodeEpsilon);

}  // namespace bohm
