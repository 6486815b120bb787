#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bloc/models.hpp"
#include "bloc/spectral.hpp"
#include "bloc/units.hpp"

using namespace bloc;

namespace {

double level_cm(const SystemModel& m, int i) {
  return m.energies[i] * units::hartree_cm;
}

int apply_permutation_gate(const TargetSet& t, const QubitBasisMap& map, int q) {
  // Index the target basis state of channel q (targets must be basis states).
  const StateVector& tgt = t.pairs[q].second;
  for (int i = 0; i < tgt.size(); ++i)
    if (std::abs(tgt[i]) > 0.5) return i;
  return -1;
}

} // namespace

TEST_CASE("two-mode ladder reproduces the qubit transition table") {
  const RamanSystem sys = build_two_mode_raman_system({});
  const auto& q = sys.qubits;
  CHECK(q.i00 == 0);
  CHECK(sys.model.labels[q.i00] == "v00");
  CHECK(sys.model.labels[q.i01] == "v01");
  CHECK(sys.model.labels[q.i10] == "v10");
  CHECK(sys.model.labels[q.i11] == "v11");

  // 00->01: 3030, 10->11: 3008, 00->10: 2990, 01->11: 2968 (cm^-1).
  const auto& m = sys.model;
  CHECK(level_cm(m, q.i01) - level_cm(m, q.i00) == doctest::Approx(3030.0));
  CHECK(level_cm(m, q.i11) - level_cm(m, q.i10) == doctest::Approx(3008.0));
  CHECK(level_cm(m, q.i10) - level_cm(m, q.i00) == doctest::Approx(2990.0));
  CHECK(level_cm(m, q.i11) - level_cm(m, q.i01) == doctest::Approx(2968.0));

  // Energies sorted ascending, first overtone region ordering.
  for (int i = 1; i < m.dimension(); ++i) CHECK(m.energies[i] >= m.energies[i - 1]);
  CHECK(m.labels[3] == "v20"); // 5906
  CHECK(m.labels[4] == "v02"); // 5957
  CHECK(m.labels[5] == "v11"); // 5998
  CHECK(level_cm(m, 5) == doctest::Approx(5998.0));
}

TEST_CASE("polarizability selection rules") {
  const RamanSystem sys = build_two_mode_raman_system({});
  const auto& c = sys.model.coupling_op;
  const auto& q = sys.qubits;
  const double r = std::sqrt(0.5);
  for (int i = 0; i < sys.model.dimension(); ++i)
    CHECK(c(i, i) == doctest::Approx(10.0));
  CHECK(c(q.i00, q.i10) == doctest::Approx(r)); // Q1, v1: 0 -> 1
  CHECK(c(q.i00, q.i01) == doctest::Approx(r)); // Q2, v2: 0 -> 1
  CHECK(c(q.i00, q.i11) == doctest::Approx(0.0));
  CHECK(c(q.i01, q.i11) == doctest::Approx(r));
  // One quantum higher: <v10|Q1|v20> = sqrt(2/2) = 1.
  int i20 = -1;
  for (int i = 0; i < sys.model.dimension(); ++i)
    if (sys.model.labels[i] == "v20") i20 = i;
  REQUIRE(i20 >= 0);
  CHECK(c(q.i10, i20) == doctest::Approx(1.0));
  CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("harmonic limit and degeneracy guard") {
  TwoModeParams p;
  p.d1_cm = p.d2_cm = p.d12_cm = 0.0;
  p.n_states = 12;
  // Harmonic ladders make 00->01 and 10->11 exactly degenerate.
  CHECK_THROWS_AS(build_two_mode_raman_system(p), std::invalid_argument);

  p.degeneracy_guard_cm = 0.0;
  const RamanSystem sys = build_two_mode_raman_system(p);
  for (int i = 0; i < sys.model.dimension(); ++i) {
    const std::string& l = sys.model.labels[i];
    const int v1 = l[1] - '0';
    const int v2 = l[2] - '0';
    CHECK(level_cm(sys.model, i) ==
          doctest::Approx(p.nu1_cm * v1 + p.nu2_cm * v2).epsilon(1e-10));
  }
}

TEST_CASE("two-mode builder validation") {
  TwoModeParams p;
  p.n_states = 3;
  CHECK_THROWS_AS(build_two_mode_raman_system(p), std::invalid_argument);
  p.n_states = 50;
  p.nu1_cm = -1.0;
  CHECK_THROWS_AS(build_two_mode_raman_system(p), std::invalid_argument);
}

TEST_CASE("gate parsing") {
  CHECK(parse_gate("not") == Gate::NOT);
  CHECK(parse_gate("CNOT") == Gate::CNOT);
  CHECK(parse_gate("hadamard") == Gate::Hadamard);
  CHECK(gate_name(parse_gate(gate_name(Gate::Identity))) == "identity");
  CHECK_THROWS_AS(parse_gate("swap"), std::invalid_argument);
}

TEST_CASE("gate target tables") {
  const RamanSystem sys = build_two_mode_raman_system({});
  const auto& q = sys.qubits;
  const auto idx = q.indices();

  const TargetSet id_t = gate_targets(Gate::Identity, q, sys.model);
  const TargetSet not_t = gate_targets(Gate::NOT, q, sys.model);
  const TargetSet cnot_t = gate_targets(Gate::CNOT, q, sys.model);

  for (int c = 0; c < 4; ++c) {
    CHECK(apply_permutation_gate(id_t, q, c) == idx[c]);
    CHECK(apply_permutation_gate(not_t, q, c) == idx[c ^ 1]);
  }
  CHECK(apply_permutation_gate(cnot_t, q, 0) == idx[0]);
  CHECK(apply_permutation_gate(cnot_t, q, 1) == idx[1]);
  CHECK(apply_permutation_gate(cnot_t, q, 2) == idx[3]);
  CHECK(apply_permutation_gate(cnot_t, q, 3) == idx[2]);

  // NOT applied twice is the identity permutation.
  for (int c = 0; c < 4; ++c) {
    const int once = apply_permutation_gate(not_t, q, c);
    int chan = -1;
    for (int d = 0; d < 4; ++d)
      if (idx[d] == once) chan = d;
    CHECK(apply_permutation_gate(not_t, q, chan) == idx[c]);
  }

  // Hadamard targets are orthonormal superpositions of the active pair.
  const TargetSet h = gate_targets(Gate::Hadamard, q, sys.model);
  for (int a = 0; a < 4; ++a) {
    CHECK(h.pairs[a].second.norm() == doctest::Approx(1.0));
    for (int b = a + 1; b < 4; ++b)
      CHECK(std::abs(h.pairs[a].second.dot(h.pairs[b].second)) < 1e-12);
  }
  CHECK(std::abs(h.pairs[0].second[idx[0]] - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(h.pairs[1].second[idx[1]] + 1.0 / std::sqrt(2.0)) < 1e-12);

  QubitBasisMap bad = q;
  bad.i11 = sys.model.dimension();
  CHECK_THROWS_AS(gate_targets(Gate::NOT, bad, sys.model), std::invalid_argument);
}

TEST_CASE("gaussian guess envelope and spectrum") {
  const double dt = units::fs_to_au(0.25);
  const TimeGrid grid(8000, dt);
  const double carrier = 3000.0;
  const double center = grid.total_time() / 2.0;
  const double fwhm = units::fs_to_au(300.0);
  const ControlField f = gaussian_guess(carrier, 0.01, center, fwhm, grid, 2);

  CHECK(f.carrier_cm == carrier);
  CHECK(f.id == 2);
  // Peak value at the center node (even n_steps: node lands on the center).
  const int jc = 4000;
  CHECK(f.samples[jc] == doctest::Approx(0.01));
  // Envelope halves one FWHM/2 away from the center (modulo the carrier).
  double env_max = 0.0;
  for (int j = 0; j < grid.n_nodes(); ++j) {
    const double t = std::abs(grid.node(j) - center);
    if (std::abs(t - fwhm / 2.0) < dt)
      env_max = std::max(env_max, std::abs(f.samples[j]));
  }
  CHECK(env_max == doctest::Approx(0.005).epsilon(0.02));

  // Spectrum peaks at the carrier.
  const auto spec = power_spectrum(f, grid);
  double best_nu = 0.0, best_p = -1.0;
  for (const auto& pt : spec)
    if (pt.power > best_p) {
      best_p = pt.power;
      best_nu = pt.nu_cm;
    }
  CHECK(best_nu == doctest::Approx(carrier).epsilon(0.01));

  CHECK_THROWS_AS(gaussian_guess(1e7, 0.01, center, fwhm, grid), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_guess(carrier, 0.01, -1.0, fwhm, grid), std::invalid_argument);
}

TEST_CASE("system JSON round trip") {
  const RamanSystem sys = build_two_mode_raman_system({.n_states = 16});
  const std::string text = system_to_json(sys.model);
  const SystemModel back = system_from_json(text);
  CHECK(back.dimension() == 16);
  CHECK(back.kind == InteractionKind::Raman);
  CHECK((back.energies - sys.model.energies).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((back.coupling_op - sys.model.coupling_op).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.labels == sys.model.labels);

  CHECK_THROWS_AS(system_from_json("{\"energies_cm\": [0, 1], "
                                   "\"coupling_row_major\": [1, 0, 0]}"),
                  std::invalid_argument);
}
