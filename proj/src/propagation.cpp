#include "bloc/propagation.hpp"

#include <cmath>

namespace bloc {

namespace {

// J_k for possibly negative argument: J_k(-x) = (-1)^k J_k(x).
double bessel_j(int k, double x) {
  const double v = std::cyl_bessel_j(static_cast<double>(k), std::abs(x));
  return (x < 0.0 && (k % 2)) ? -v : v;
}

// Chebyshev coefficients a_k = (2 - delta_k0) (-i)^k J_k(z), truncated where
// |a_k| < tol once k exceeds |z|.
std::vector<Complex> chebyshev_coeffs(double z, double tol, int max_order) {
  static const Complex mi(0.0, -1.0);
  std::vector<Complex> coeffs;
  Complex ik = 1.0;
  for (int k = 0;; ++k) {
    const double jk = bessel_j(k, z);
    const double mag = (k == 0 ? 1.0 : 2.0) * std::abs(jk);
    coeffs.push_back((k == 0 ? 1.0 : 2.0) * ik * jk);
    if (k > std::abs(z) && mag < tol) break;
    if (k >= max_order)
      throw std::runtime_error("chebyshev: expansion order cap exceeded (dt too large?)");
    ik *= mi;
  }
  return coeffs;
}

// Clenshaw-style forward recurrence accumulation of sum_k a_k T_k(Hs) psi.
template <typename ApplyScaled>
StateVector chebyshev_apply(const std::vector<Complex>& coeffs, const StateVector& psi,
                            const ApplyScaled& apply_scaled) {
  StateVector phi_prev = psi;            // T_0 psi
  StateVector acc = coeffs[0] * phi_prev;
  if (coeffs.size() == 1) return acc;
  StateVector phi = apply_scaled(psi);   // T_1 psi
  acc += coeffs[1] * phi;
  for (size_t k = 2; k < coeffs.size(); ++k) {
    StateVector next = 2.0 * apply_scaled(phi) - phi_prev;
    phi_prev = std::move(phi);
    phi = std::move(next);
    acc += coeffs[k] * phi;
  }
  return acc;
}

} // namespace

void validate_propagator_config(const PropagatorConfig& cfg) {
  if (cfg.cheb_tolerance <= 0.0 || cfg.cheb_tolerance > 1e-6)
    throw std::invalid_argument("PropagatorConfig: cheb_tolerance must be in (0, 1e-6]");
  if (cfg.spectral_margin < 1.0)
    throw std::invalid_argument("PropagatorConfig: spectral_margin must be >= 1");
}

double interaction_prefactor(double eps1, double eps2, const SystemModel& system) {
  if (system.kind == InteractionKind::Raman) return -0.5 * eps1 * eps2;
  return -eps1;
}

StateVector chebyshev_step(const ComplexMatrix& H, const StateVector& psi,
                           double dt, const PropagatorConfig& cfg) {
  validate_propagator_config(cfg);
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n || psi.size() != n)
    throw std::invalid_argument("chebyshev_step: shape mismatch");
  // Gershgorin bounds.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < n; ++i) {
    const double d = H(i, i).real();
    double r = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) r += std::abs(H(i, j));
    lo = std::min(lo, d - r);
    hi = std::max(hi, d + r);
  }
  const double center = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo) * cfg.spectral_margin;
  if (!(half >= 0.0))
    throw std::runtime_error("chebyshev_step: non-positive spectral range estimate");
  const Complex phase = std::exp(Complex(0.0, -center * dt));
  if (half == 0.0) return phase * psi;
  const auto coeffs = chebyshev_coeffs(half * dt, cfg.cheb_tolerance, cfg.max_order);
  const auto apply_scaled = [&](const StateVector& v) -> StateVector {
    return (H * v - center * v) / half;
  };
  return phase * chebyshev_apply(coeffs, psi, apply_scaled);
}

ChebyshevPropagator::ChebyshevPropagator(const SystemModel& system, double dt,
                                         double max_abs_prefactor,
                                         const PropagatorConfig& cfg)
    : energies_(system.energies),
      coupling_(system.coupling_op.cast<Complex>()),
      dt_(dt) {
  validate_propagator_config(cfg);
  const double e_lo = energies_.minCoeff();
  const double e_hi = energies_.maxCoeff();
  const double pad = max_abs_prefactor *
                     system.coupling_op.cwiseAbs().rowwise().sum().maxCoeff();
  center_ = 0.5 * (e_hi + e_lo);
  half_range_ = (0.5 * (e_hi - e_lo) + pad) * cfg.spectral_margin;
  phase_ = std::exp(Complex(0.0, -center_ * dt_));
  if (half_range_ <= 0.0) {
    if (pad == 0.0 && e_hi == e_lo) {
      trivial_ = true;
      return;
    }
    throw std::runtime_error("chebyshev: non-positive spectral range estimate");
  }
  coeffs_ = chebyshev_coeffs(half_range_ * dt_, cfg.cheb_tolerance, cfg.max_order);
}

void ChebyshevPropagator::step(StateVector& psi, double prefactor) const {
  if (trivial_) {
    psi *= phase_;
    return;
  }
  const auto apply_scaled = [&](const StateVector& v) -> StateVector {
    StateVector out = prefactor * (coupling_ * v);
    out.array() += (energies_.array() - center_) * v.array();
    out /= half_range_;
    return out;
  };
  psi = phase_ * chebyshev_apply(coeffs_, psi, apply_scaled);
}

namespace {

void check_fields(const SystemModel& system, const std::vector<ControlField>& fields,
                  const TimeGrid& grid) {
  if (static_cast<int>(fields.size()) != system.field_count())
    throw std::invalid_argument("propagate: field count does not match interaction kind");
  for (const auto& f : fields) validate_field(f, grid);
}

double midpoint_prefactor(const SystemModel& system, const std::vector<ControlField>& fields,
                          int j) {
  const double e1 = 0.5 * (fields[0].samples[j] + fields[0].samples[j + 1]);
  const double e2 = system.kind == InteractionKind::Raman
                        ? 0.5 * (fields[1].samples[j] + fields[1].samples[j + 1])
                        : 0.0;
  return interaction_prefactor(e1, e2, system);
}

template <typename Step>
Trajectory run_trajectory(const StateVector& psi0, const TimeGrid& grid, int stride,
                          bool backward, const Step& step) {
  if (stride < 1) throw std::invalid_argument("propagate: stride must be >= 1");
  Trajectory traj;
  traj.grid = grid;
  traj.stride = stride;
  const int n_rec = grid.n_steps / stride + 1 + (grid.n_steps % stride ? 1 : 0);
  traj.states.reserve(n_rec);
  StateVector psi = psi0;
  const double norm0 = psi.norm();

  std::vector<StateVector> recorded(grid.n_steps + 1);
  auto record = [&](int node, const StateVector& s) {
    if (node % stride == 0 || node == grid.n_steps) recorded[node] = s;
  };
  if (backward) {
    record(grid.n_steps, psi);
    for (int j = grid.n_steps - 1; j >= 0; --j) {
      step(psi, j);
      record(j, psi);
    }
  } else {
    record(0, psi);
    for (int j = 0; j < grid.n_steps; ++j) {
      step(psi, j);
      record(j + 1, psi);
    }
  }
  if (std::abs(psi.norm() - norm0) > 1e-6)
    throw std::runtime_error("propagate: norm drift exceeds 1e-6");
  for (int node = 0; node <= grid.n_steps; ++node)
    if (recorded[node].size() > 0) traj.states.push_back(std::move(recorded[node]));
  return traj;
}

} // namespace

Trajectory propagate(const SystemModel& system, const std::vector<ControlField>& fields,
                     const StateVector& psi0, const TimeGrid& grid,
                     const PropagatorConfig& cfg, int stride, bool backward) {
  check_fields(system, fields, grid);
  double max_pref = 0.0;
  for (int j = 0; j < grid.n_steps; ++j)
    max_pref = std::max(max_pref, std::abs(midpoint_prefactor(system, fields, j)));
  const double dt = backward ? -grid.dt : grid.dt;
  ChebyshevPropagator prop(system, dt, max_pref, cfg);
  return run_trajectory(psi0, grid, stride, backward, [&](StateVector& psi, int j) {
    prop.step(psi, midpoint_prefactor(system, fields, j));
  });
}

Trajectory reference_propagate(const SystemModel& system,
                               const std::vector<ControlField>& fields,
                               const StateVector& psi0, const TimeGrid& grid,
                               int stride, bool backward) {
  check_fields(system, fields, grid);
  if (system.dimension() > 64)
    throw std::invalid_argument("reference_propagate: dimension cap (64) exceeded");
  const double dt = backward ? -grid.dt : grid.dt;
  const RealMatrix h0 = system.energies.asDiagonal();
  return run_trajectory(psi0, grid, stride, backward, [&](StateVector& psi, int j) {
    const RealMatrix h = h0 + midpoint_prefactor(system, fields, j) * system.coupling_op;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    const StateVector in_eig = es.eigenvectors().transpose().cast<Complex>() * psi;
    StateVector rotated(in_eig.size());
    for (int i = 0; i < in_eig.size(); ++i)
      rotated[i] = std::exp(Complex(0.0, -es.eigenvalues()[i] * dt)) * in_eig[i];
    psi = es.eigenvectors().cast<Complex>() * rotated;
  });
}

} // namespace bloc
