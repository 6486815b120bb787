#pragma once

#include <array>
#include <string>

#include "bloc/core.hpp"

namespace bloc {

/// Two-mode anharmonic-ladder Raman system with a polarizability operator
/// linear in the mode coordinates.
struct TwoModeParams {
  double nu1_cm = 2990.0;
  double nu2_cm = 3030.0;
  double d1_cm = 74.0;   // intramode anharmonicity, mode 1
  double d2_cm = 103.0;  // intramode anharmonicity, mode 2
  double d12_cm = 22.0;  // intermode anharmonicity
  int n_states = 50;
  double alpha_lin1 = 1.0;  // a.u.
  double alpha_lin2 = 1.0;  // a.u.
  double alpha_static = 10.0; // a.u.
  double degeneracy_guard_cm = 1.0;
};

/// Indices of the two-qubit basis states in the sorted eigenbasis.
struct QubitBasisMap {
  int i00 = -1;
  int i01 = -1;
  int i10 = -1;
  int i11 = -1;

  std::array<int, 4> indices() const { return {i00, i01, i10, i11}; }
};

struct RamanSystem {
  SystemModel model;
  QubitBasisMap qubits;
};

/// E(v1,v2) = sum_i [nu_i v_i - (d_i/2) v_i (v_i - 1)] - d12 v1 v2, truncated
/// to the n_states lowest product-ladder states; coupling is
/// alpha_static I + alpha_lin1 Q1 + alpha_lin2 Q2 with <v-1|Q|v> = sqrt(v/2).
RamanSystem build_two_mode_raman_system(const TwoModeParams& p);

SystemModel build_nlevel_dipole(const RealVector& energies_cm, const RealMatrix& dipole);

enum class Gate { Identity, NOT, CNOT, Hadamard };

Gate parse_gate(const std::string& name);
std::string gate_name(Gate g);

/// Four initial/target pairs implementing the gate on the qubit basis.
/// NOT flips the second qubit on all four states; CNOT flips it only when
/// the first qubit is |1>; Hadamard acts on the second (active) qubit.
TargetSet gate_targets(Gate gate, const QubitBasisMap& basis, const SystemModel& system);

/// eps(t) = A exp(-4 ln2 (t - t0)^2 / fwhm^2) cos(2 pi nu (t - t0)),
/// all times in a.u., carrier in cm^-1.
ControlField gaussian_guess(double carrier_cm, double amplitude_au, double center_au,
                            double fwhm_au, const TimeGrid& grid, int id = 1);

/// JSON import/export of SystemModel (energies in cm^-1, dense row-major
/// coupling matrix, labels).
std::string system_to_json(const SystemModel& system);
SystemModel system_from_json(const std::string& json_text);

} // namespace bloc
