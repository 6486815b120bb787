#pragma once

#include <vector>

#include "bloc/core.hpp"

namespace bloc {

struct PropagatorConfig {
  double cheb_tolerance = 1e-12; // truncation threshold on expansion coefficients
  double spectral_margin = 1.1;  // safety factor on the spectral half-range
  int max_order = 100000;        // hard cap; exceeding it signals dt too large
};

void validate_propagator_config(const PropagatorConfig& cfg);

/// States sampled along [0, T]; states[i] is the state at node i * stride
/// (the final node is always included).
struct Trajectory {
  std::vector<StateVector> states;
  int stride = 1;
  TimeGrid grid;

  const StateVector& final_state() const { return states.back(); }
};

/// Scalar interaction prefactor: -1/2 eps1 eps2 for Raman, -eps for dipole
/// (the interaction matrix at time t is prefactor * coupling_op).
double interaction_prefactor(double eps1, double eps2, const SystemModel& system);

/// One Chebyshev-expansion step exp(-i H dt) psi for a generic Hermitian H.
/// Spectral bounds come from Gershgorin discs widened by spectral_margin.
StateVector chebyshev_step(const ComplexMatrix& H, const StateVector& psi,
                           double dt, const PropagatorConfig& cfg);

/// Reusable Chebyshev stepper for H(t) = diag(E) + prefactor(t) * coupling,
/// with fixed dt and a prefactor bound. Coefficients are computed once.
class ChebyshevPropagator {
 public:
  ChebyshevPropagator(const SystemModel& system, double dt, double max_abs_prefactor,
                      const PropagatorConfig& cfg);

  void step(StateVector& psi, double prefactor) const;
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }

 private:
  RealVector energies_;
  ComplexMatrix coupling_;
  double dt_;
  double center_;
  double half_range_;
  std::vector<Complex> coeffs_; // a_k = (2 - delta_k0) (-i)^k J_k(half_range * dt)
  Complex phase_;               // exp(-i center dt)
  bool trivial_ = false;        // degenerate spectral range: pure phase
};

/// Propagates psi0 with a piecewise-constant midpoint Hamiltonian per step.
/// `fields` must match the interaction kind (2 for Raman, 1 for dipole).
/// Negative-dt grids are not allowed; use `backward` to propagate targets
/// from T to 0 (states are still indexed 0..n from t=0).
Trajectory propagate(const SystemModel& system, const std::vector<ControlField>& fields,
                     const StateVector& psi0, const TimeGrid& grid,
                     const PropagatorConfig& cfg = {}, int stride = 1,
                     bool backward = false);

/// Same stepping scheme, each step via exact eigendecomposition of the real
/// symmetric step Hamiltonian. Test oracle; dimension capped at 64.
Trajectory reference_propagate(const SystemModel& system,
                               const std::vector<ControlField>& fields,
                               const StateVector& psi0, const TimeGrid& grid,
                               int stride = 1, bool backward = false);

} // namespace bloc
