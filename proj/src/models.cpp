#include "bloc/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "bloc/units.hpp"

namespace bloc {

namespace {

double ladder_energy(const TwoModeParams& p, int v1, int v2) {
  auto mode = [](double nu, double d, int v) {
    return nu * v - 0.5 * d * v * (v - 1);
  };
  return mode(p.nu1_cm, p.d1_cm, v1) + mode(p.nu2_cm, p.d2_cm, v2) - p.d12_cm * v1 * v2;
}

} // namespace

RamanSystem build_two_mode_raman_system(const TwoModeParams& p) {
  if (p.n_states < 4)
    throw std::invalid_argument("build_two_mode_raman_system: n_states must be >= 4");
  if (p.nu1_cm <= 0.0 || p.nu2_cm <= 0.0)
    throw std::invalid_argument("build_two_mode_raman_system: fundamentals must be positive");

  // Enumerate the product ladder below the anharmonic turnover and keep the
  // n_states lowest.
  auto vmax = [&](double nu, double d) {
    int v = p.n_states;
    if (d > 0.0) v = std::min(v, static_cast<int>(nu / d) + 1);
    return v;
  };
  const int v1max = vmax(p.nu1_cm, p.d1_cm);
  const int v2max = vmax(p.nu2_cm, p.d2_cm);
  struct Level {
    double e_cm;
    int v1, v2;
  };
  std::vector<Level> levels;
  for (int v1 = 0; v1 <= v1max; ++v1)
    for (int v2 = 0; v2 <= v2max; ++v2)
      levels.push_back({ladder_energy(p, v1, v2), v1, v2});
  if (static_cast<int>(levels.size()) < p.n_states)
    throw std::invalid_argument("build_two_mode_raman_system: ladder too small for n_states");
  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level& a, const Level& b) { return a.e_cm < b.e_cm; });
  levels.resize(p.n_states);

  const int n = p.n_states;
  RealVector energies(n);
  std::vector<std::string> labels(n);
  QubitBasisMap map;
  for (int i = 0; i < n; ++i) {
    energies[i] = levels[i].e_cm;
    labels[i] = "v" + std::to_string(levels[i].v1) + std::to_string(levels[i].v2);
    if (levels[i].v1 == 0 && levels[i].v2 == 0) map.i00 = i;
    if (levels[i].v1 == 0 && levels[i].v2 == 1) map.i01 = i;
    if (levels[i].v1 == 1 && levels[i].v2 == 0) map.i10 = i;
    if (levels[i].v1 == 1 && levels[i].v2 == 1) map.i11 = i;
  }
  if (map.i00 != 0 || map.i01 < 0 || map.i10 < 0 || map.i11 < 0)
    throw std::invalid_argument("build_two_mode_raman_system: qubit levels not in basis");

  // Harmonic-ladder position operators embedded in the selected product basis.
  RealMatrix coupling = RealMatrix::Identity(n, n) * p.alpha_static;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& a = levels[i];
      const auto& b = levels[j];
      if (a.v2 == b.v2 && std::abs(a.v1 - b.v1) == 1)
        coupling(i, j) += p.alpha_lin1 * std::sqrt(std::max(a.v1, b.v1) / 2.0);
      if (a.v1 == b.v1 && std::abs(a.v2 - b.v2) == 1)
        coupling(i, j) += p.alpha_lin2 * std::sqrt(std::max(a.v2, b.v2) / 2.0);
    }
  }

  // Guard against (near-)degenerate qubit transition frequencies.
  const double t01 = energies[map.i01] - energies[map.i00];
  const double t23 = energies[map.i11] - energies[map.i10];
  const double t02 = energies[map.i10] - energies[map.i00];
  const double t13 = energies[map.i11] - energies[map.i01];
  const std::vector<double> transitions = {t01, t23, t02, t13};
  for (size_t a = 0; a < transitions.size(); ++a)
    for (size_t b = a + 1; b < transitions.size(); ++b)
      if (std::abs(transitions[a] - transitions[b]) < p.degeneracy_guard_cm)
        throw std::invalid_argument(
            "build_two_mode_raman_system: degenerate qubit transitions");

  RamanSystem out;
  out.model = make_system(energies, coupling, InteractionKind::Raman, std::move(labels));
  out.qubits = map;
  return out;
}

SystemModel build_nlevel_dipole(const RealVector& energies_cm, const RealMatrix& dipole) {
  return make_system(energies_cm, dipole, InteractionKind::Dipole);
}

Gate parse_gate(const std::string& name) {
  if (name == "identity" || name == "Identity") return Gate::Identity;
  if (name == "not" || name == "NOT") return Gate::NOT;
  if (name == "cnot" || name == "CNOT") return Gate::CNOT;
  if (name == "hadamard" || name == "Hadamard") return Gate::Hadamard;
  throw std::invalid_argument("unknown gate: " + name);
}

std::string gate_name(Gate g) {
  switch (g) {
    case Gate::Identity: return "identity";
    case Gate::NOT: return "not";
    case Gate::CNOT: return "cnot";
    case Gate::Hadamard: return "hadamard";
  }
  return "?";
}

TargetSet gate_targets(Gate gate, const QubitBasisMap& basis, const SystemModel& system) {
  const int n = system.dimension();
  const auto idx = basis.indices();
  for (int i : idx)
    if (i < 0 || i >= n) throw std::invalid_argument("gate_targets: invalid basis map");

  auto basis_state = [&](int i) {
    StateVector s = StateVector::Zero(n);
    s[i] = 1.0;
    return s;
  };
  TargetSet set;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int q = 0; q < 4; ++q) {
    const StateVector ini = basis_state(idx[q]);
    StateVector tgt;
    switch (gate) {
      case Gate::Identity:
        tgt = ini;
        break;
      case Gate::NOT:
        tgt = basis_state(idx[q ^ 1]); // flip second qubit everywhere
        break;
      case Gate::CNOT:
        tgt = basis_state(q >= 2 ? idx[q ^ 1] : idx[q]);
        break;
      case Gate::Hadamard: {
        const int base = q & 2;
        tgt = inv_sqrt2 * basis_state(idx[base]) +
              (q & 1 ? -inv_sqrt2 : inv_sqrt2) * basis_state(idx[base | 1]);
        break;
      }
    }
    set.pairs.emplace_back(ini, tgt);
  }
  return set;
}

ControlField gaussian_guess(double carrier_cm, double amplitude_au, double center_au,
                            double fwhm_au, const TimeGrid& grid, int id) {
  if (carrier_cm > grid.nyquist_cm())
    throw std::invalid_argument("gaussian_guess: carrier above Nyquist");
  if (center_au < 0.0 || center_au > grid.total_time())
    throw std::invalid_argument("gaussian_guess: pulse center outside [0, T]");
  const double omega = units::cm_to_hartree(carrier_cm);
  ControlField f;
  f.carrier_cm = carrier_cm;
  f.id = id;
  f.samples.resize(grid.n_nodes());
  const double four_ln2 = 4.0 * std::log(2.0);
  for (int j = 0; j < grid.n_nodes(); ++j) {
    const double t = grid.node(j) - center_au;
    f.samples[j] = amplitude_au * std::exp(-four_ln2 * t * t / (fwhm_au * fwhm_au)) *
                   std::cos(omega * t);
  }
  return f;
}

std::string system_to_json(const SystemModel& system) {
  nlohmann::json j;
  j["energies_cm"] = std::vector<double>(system.energies.data(),
                                         system.energies.data() + system.energies.size());
  for (auto& e : j["energies_cm"]) e = e.get<double>() * units::hartree_cm;
  std::vector<double> coupling;
  coupling.reserve(system.dimension() * system.dimension());
  for (int r = 0; r < system.dimension(); ++r)
    for (int c = 0; c < system.dimension(); ++c)
      coupling.push_back(system.coupling_op(r, c));
  j["coupling_row_major"] = coupling;
  j["interaction"] = system.kind == InteractionKind::Raman ? "raman" : "dipole";
  j["labels"] = system.labels;
  return j.dump(2);
}

SystemModel system_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  const auto energies = j.at("energies_cm").get<std::vector<double>>();
  const int n = static_cast<int>(energies.size());
  const auto flat = j.at("coupling_row_major").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != n * n)
    throw std::invalid_argument("system_from_json: coupling size mismatch");
  RealVector e(n);
  for (int i = 0; i < n; ++i) e[i] = energies[i];
  RealMatrix coupling(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) coupling(r, c) = flat[r * n + c];
  const std::string kind = j.value("interaction", "dipole");
  std::vector<std::string> labels = j.value("labels", std::vector<std::string>{});
  return make_system(e, coupling,
                     kind == "raman" ? InteractionKind::Raman : InteractionKind::Dipole,
                     std::move(labels));
}

} // namespace bloc
