#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bloc/core.hpp"
#include "bloc/propagation.hpp"
#include "bloc/spectral.hpp"

namespace bloc {

enum class UpdateOrder { Eps1ThenEps2, Eps2ThenEps1 };

struct KrotovConfig {
  double alpha0 = 10.0;
  int max_iters = 100;
  double yield_target = 1.0;            // on avg_fidelity
  std::vector<SpectralFilter> filters;  // per-field band-pass
  ShapeFunction shape;
  std::optional<int> freeze_field;      // field id held fixed (Raman only)
  UpdateOrder update_order = UpdateOrder::Eps1ThenEps2;
  PropagatorConfig prop;
  double monotonic_slack = 1e-9;        // per target channel
  double stagnation_tol = 1e-7;
  int stagnation_window = 10;
  int threads = 1;
};

struct FunctionalTerms {
  double objective = 0.0;      // sum_k |<psi_k(T)|phi_k>|^2
  double energy_penalty = 0.0; // sum_l alpha0 int |eps - eps_ref|^2 / s dt
  double filter_penalty = 0.0; // out-of-band energy of the fields
};

struct IterationRecord {
  int iter = 0;
  double yield_sum_sq = 0.0;
  double avg_fidelity = 0.0;
  double phase_fidelity = 0.0;
  FunctionalTerms functional;
  std::vector<double> out_of_band_fraction; // per field, pre-post-filter update
  std::vector<double> monotonicity_residual; // per field
  std::vector<double> field_energy;          // per field, int eps^2 dt
};

enum class TerminationReason { YieldTarget, MaxIters, Stagnation, NonMonotone };

std::string termination_reason_name(TerminationReason r);

struct OptimizationResult {
  std::vector<ControlField> final_fields;
  std::vector<IterationRecord> records;
  bool converged = false;
  TerminationReason reason = TerminationReason::MaxIters;
};

struct KrotovProblem {
  SystemModel system;
  TargetSet targets;
  TimeGrid grid;
  std::vector<ControlField> guess;
  KrotovConfig cfg;
};

/// Uncorrected update prediction gamma'_l(t) from previous-iteration forward
/// and backward trajectories (both stored at every node, stride 1):
///   gamma'_l(t) = sum_k q_l(t) Im[<phi_k(t)|psi_k(t)> <psi_k(t)|A|phi_k(t)>]
/// with A the coupling operator and q the partner-field value (Raman) or 1
/// (dipole).
RealVector compute_gamma_prime(const SystemModel& system,
                               const std::vector<ControlField>& fields,
                               const std::vector<Trajectory>& forward,
                               const std::vector<Trajectory>& backward,
                               const TimeGrid& grid, int which_field);

/// Band-stop projection of gamma': keeps only out-of-band components.
RealVector compute_gamma(const RealVector& gamma_prime, const SpectralFilter& band_stop);

struct SweepResult {
  std::vector<ControlField> fields;       // updated, pre-post-filter
  std::vector<StateVector> final_states;  // forward states at T under new fields
};

/// Immediate-feedback forward sweep: per update_order, each unfrozen field is
/// updated node by node while all channel states advance with the already
/// updated values, eps^{n+1}(t_j) = eps^n(t_j) - s_j/(2 alpha0) (gamma_j - sum_k C_k).
SweepResult forward_update(const SystemModel& system,
                           const std::vector<ControlField>& fields_prev,
                           const std::vector<RealVector>& gammas,
                           const std::vector<Trajectory>& backward,
                           const TargetSet& targets, const KrotovConfig& cfg,
                           const TimeGrid& grid);

/// Band-pass projection of every field (frozen fields untouched).
std::vector<ControlField> post_filter(const std::vector<ControlField>& fields,
                                      const std::vector<SpectralFilter>& filters,
                                      std::optional<int> freeze_field = std::nullopt);

/// Discretized Eq.-A15-style residual int [(alpha0/s) deps^2 + gamma deps] dt;
/// non-negative when the update formula holds exactly.
double monotonicity_residual(const RealVector& delta_eps, const RealVector& gamma,
                             const ShapeFunction& shape, double alpha0, double dt);

FunctionalTerms evaluate_functional(const std::vector<StateVector>& finals,
                                    const TargetSet& targets,
                                    const std::vector<ControlField>& fields,
                                    const std::vector<ControlField>& reference_fields,
                                    const ShapeFunction& shape, double alpha0,
                                    const std::vector<SpectralFilter>& filters,
                                    const TimeGrid& grid);

using IterationCallback = std::function<void(const IterationRecord&)>;

OptimizationResult iterate(const KrotovProblem& problem,
                           const IterationCallback& on_iteration = {});

} // namespace bloc
