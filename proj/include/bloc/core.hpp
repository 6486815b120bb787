#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bloc {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Uniform time grid over [0, T] in atomic units. Field samples live on the
/// n_steps + 1 grid nodes.
struct TimeGrid {
  int n_steps = 0;
  double dt = 0.0; // a.u. of time

  TimeGrid() = default;
  TimeGrid(int n_steps_, double dt_);

  static TimeGrid from_total_time(double total_time_au, int n_steps);

  int n_nodes() const { return n_steps + 1; }
  double total_time() const { return n_steps * dt; }
  double node(int j) const { return j * dt; }
  // Nyquist frequency of the node sampling, in cm^-1.
  double nyquist_cm() const;

  bool operator==(const TimeGrid& o) const {
    return n_steps == o.n_steps && dt == o.dt;
  }
};

enum class InteractionKind { Raman, Dipole };

/// Finite-dimensional system in eigenstate representation: diagonal energies
/// plus one real symmetric coupling operator (polarizability for Raman,
/// dipole for linear interaction).
struct SystemModel {
  RealVector energies;   // hartree, sorted non-decreasing
  RealMatrix coupling_op; // a.u.
  InteractionKind kind = InteractionKind::Dipole;
  std::vector<std::string> labels; // optional per-state tags

  int dimension() const { return static_cast<int>(energies.size()); }
  int field_count() const { return kind == InteractionKind::Raman ? 2 : 1; }
};

/// Validates symmetry / ordering and returns the model. Energies are given
/// in cm^-1 at this boundary and stored internally in hartree.
SystemModel make_system(const RealVector& energies_cm, const RealMatrix& coupling_op,
                        InteractionKind kind,
                        std::vector<std::string> labels = {});

/// One real-valued discretized control field on a shared TimeGrid.
struct ControlField {
  RealVector samples;      // length n_nodes
  double carrier_cm = 0.0; // metadata: guess-construction carrier
  int id = 1;              // field index l in {1, 2}
};

void validate_field(const ControlField& field, const TimeGrid& grid);

/// The k initial/target state pairs of a global gate operation, weighted
/// 1/k each.
struct TargetSet {
  std::vector<std::pair<StateVector, StateVector>> pairs;

  int size() const { return static_cast<int>(pairs.size()); }
};

/// Checks orthonormality of the initial set and of the target set.
void validate_targets(const TargetSet& targets, int dimension,
                      double tol = 1e-8);

struct YieldReport {
  double sum_sq = 0.0;        // sum_k |<psi_k(T)|phi_k>|^2
  double avg_fidelity = 0.0;  // sum_sq / k
  double phase_fidelity = 0.0; // |sum_k <psi_k(T)|phi_k> / k|^2
};

YieldReport gate_yield(const std::vector<StateVector>& finals,
                       const TargetSet& targets, double norm_tol = 1e-8);

} // namespace bloc
