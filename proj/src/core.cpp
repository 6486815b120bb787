#include "bloc/core.hpp"

#include <cmath>

#include "bloc/units.hpp"

namespace bloc {

TimeGrid::TimeGrid(int n_steps_, double dt_) : n_steps(n_steps_), dt(dt_) {
  if (dt <= 0.0) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (n_steps < 2) throw std::invalid_argument("TimeGrid: n_steps must be >= 2");
}

TimeGrid TimeGrid::from_total_time(double total_time_au, int n_steps) {
  if (n_steps < 2) throw std::invalid_argument("TimeGrid: n_steps must be >= 2");
  return TimeGrid(n_steps, total_time_au / n_steps);
}

double TimeGrid::nyquist_cm() const {
  // Highest resolvable angular frequency pi/dt, expressed in cm^-1.
  return units::hartree_to_cm(M_PI / dt);
}

SystemModel make_system(const RealVector& energies_cm, const RealMatrix& coupling_op,
                        InteractionKind kind, std::vector<std::string> labels) {
  const int n = static_cast<int>(energies_cm.size());
  if (n < 2) throw std::invalid_argument("SystemModel: need at least 2 states");
  if (coupling_op.rows() != n || coupling_op.cols() != n)
    throw std::invalid_argument("SystemModel: coupling operator shape mismatch");
  const double scale = std::max(1.0, coupling_op.cwiseAbs().maxCoeff());
  if ((coupling_op - coupling_op.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("SystemModel: coupling operator not symmetric");
  for (int i = 1; i < n; ++i)
    if (energies_cm[i] < energies_cm[i - 1])
      throw std::invalid_argument("SystemModel: energies must be sorted non-decreasing");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("SystemModel: label count mismatch");

  SystemModel m;
  m.energies = energies_cm / units::hartree_cm;
  m.coupling_op = 0.5 * (coupling_op + coupling_op.transpose());
  m.kind = kind;
  m.labels = std::move(labels);
  return m;
}

void validate_field(const ControlField& field, const TimeGrid& grid) {
  if (field.samples.size() != grid.n_nodes())
    throw std::invalid_argument("ControlField: expected n_steps + 1 samples");
  if (!field.samples.allFinite())
    throw std::invalid_argument("ControlField: non-finite sample");
}

void validate_targets(const TargetSet& targets, int dimension, double tol) {
  const int k = targets.size();
  if (k == 0) throw std::invalid_argument("TargetSet: empty");
  for (const auto& [ini, tgt] : targets.pairs) {
    if (ini.size() != dimension || tgt.size() != dimension)
      throw std::invalid_argument("TargetSet: state dimension mismatch");
  }
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b <= a; ++b) {
      const Complex gi = targets.pairs[a].first.dot(targets.pairs[b].first);
      const Complex gt = targets.pairs[a].second.dot(targets.pairs[b].second);
      const double want = a == b ? 1.0 : 0.0;
      if (std::abs(gi - want) > tol)
        throw std::invalid_argument("TargetSet: initial states not orthonormal");
      if (std::abs(gt - want) > tol)
        throw std::invalid_argument("TargetSet: target states not orthonormal");
    }
  }
}

YieldReport gate_yield(const std::vector<StateVector>& finals,
                       const TargetSet& targets, double norm_tol) {
  const int k = targets.size();
  if (static_cast<int>(finals.size()) != k)
    throw std::invalid_argument("gate_yield: list length mismatch");
  YieldReport r;
  Complex phase_sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const StateVector& psi = finals[i];
    const StateVector& phi = targets.pairs[i].second;
    if (psi.size() != phi.size())
      throw std::invalid_argument("gate_yield: state dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > norm_tol || std::abs(phi.norm() - 1.0) > norm_tol)
      throw std::invalid_argument("gate_yield: state not normalized");
    const Complex overlap = psi.dot(phi); // <psi|phi>
    r.sum_sq += std::norm(overlap);
    phase_sum += overlap;
  }
  r.avg_fidelity = r.sum_sq / k;
  r.phase_fidelity = std::norm(phase_sum / static_cast<double>(k));
  return r;
}

} // namespace bloc
