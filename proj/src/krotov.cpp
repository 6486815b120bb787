#include "bloc/krotov.hpp"

#include <cmath>
#include <future>

namespace bloc {

namespace {

// Trapezoidal quadrature on grid nodes.
double trapz(const RealVector& f, double dt) {
  double acc = 0.5 * (f[0] + f[f.size() - 1]);
  for (int j = 1; j < f.size() - 1; ++j) acc += f[j];
  return acc * dt;
}

int field_index(const std::vector<ControlField>& fields, int id) {
  for (size_t i = 0; i < fields.size(); ++i)
    if (fields[i].id == id) return static_cast<int>(i);
  throw std::invalid_argument("krotov: unknown field id");
}

std::vector<Trajectory> propagate_channels(const SystemModel& system,
                                           const std::vector<ControlField>& fields,
                                           const TargetSet& targets, const TimeGrid& grid,
                                           const PropagatorConfig& prop, bool backward,
                                           int threads) {
  const int k = targets.size();
  std::vector<Trajectory> out(k);
  auto job = [&](int i) {
    const StateVector& start = backward ? targets.pairs[i].second : targets.pairs[i].first;
    out[i] = propagate(system, fields, start, grid, prop, 1, backward);
  };
  if (threads > 1 && k > 1) {
    std::vector<std::future<void>> futures;
    for (int i = 0; i < k; ++i) futures.push_back(std::async(std::launch::async, job, i));
    for (auto& f : futures) f.get();
  } else {
    for (int i = 0; i < k; ++i) job(i);
  }
  return out;
}

std::vector<StateVector> finals_of(const std::vector<Trajectory>& trajs) {
  std::vector<StateVector> finals;
  finals.reserve(trajs.size());
  for (const auto& t : trajs) finals.push_back(t.final_state());
  return finals;
}

} // namespace

std::string termination_reason_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::YieldTarget: return "yield_target";
    case TerminationReason::MaxIters: return "max_iters";
    case TerminationReason::Stagnation: return "stagnation";
    case TerminationReason::NonMonotone: return "non_monotone";
  }
  return "?";
}

RealVector compute_gamma_prime(const SystemModel& system,
                               const std::vector<ControlField>& fields,
                               const std::vector<Trajectory>& forward,
                               const std::vector<Trajectory>& backward,
                               const TimeGrid& grid, int which_field) {
  const int l = field_index(fields, which_field);
  const int partner = static_cast<int>(fields.size()) - 1 - l;
  const int n_nodes = grid.n_nodes();
  if (forward.empty() || forward.size() != backward.size())
    throw std::invalid_argument("compute_gamma_prime: missing trajectories");
  for (const auto& t : forward)
    if (t.stride != 1 || static_cast<int>(t.states.size()) != n_nodes)
      throw std::invalid_argument("compute_gamma_prime: need full-stride trajectories");
  for (const auto& t : backward)
    if (t.stride != 1 || static_cast<int>(t.states.size()) != n_nodes)
      throw std::invalid_argument("compute_gamma_prime: need full-stride trajectories");

  const ComplexMatrix coupling = system.coupling_op.cast<Complex>();
  RealVector gp(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    const double q = system.kind == InteractionKind::Raman
                         ? fields[partner].samples[j]
                         : 1.0;
    double acc = 0.0;
    if (q != 0.0) {
      for (size_t k = 0; k < forward.size(); ++k) {
        const StateVector& psi = forward[k].states[j];
        const StateVector& phi = backward[k].states[j];
        const Complex overlap = phi.dot(psi);
        const Complex element = psi.dot(coupling * phi);
        acc += std::imag(overlap * element);
      }
    }
    gp[j] = q * acc;
  }
  return gp;
}

RealVector compute_gamma(const RealVector& gamma_prime, const SpectralFilter& band_stop) {
  return apply_fourier_filter(gamma_prime, band_stop);
}

SweepResult forward_update(const SystemModel& system,
                           const std::vector<ControlField>& fields_prev,
                           const std::vector<RealVector>& gammas,
                           const std::vector<Trajectory>& backward,
                           const TargetSet& targets, const KrotovConfig& cfg,
                           const TimeGrid& grid) {
  const int n_fields = static_cast<int>(fields_prev.size());
  const int k = targets.size();
  const int n_nodes = grid.n_nodes();
  if (static_cast<int>(gammas.size()) != n_fields)
    throw std::invalid_argument("forward_update: gamma count mismatch");
  if (static_cast<int>(backward.size()) != k)
    throw std::invalid_argument("forward_update: backward trajectory count mismatch");

  // Sweep order over unfrozen fields.
  std::vector<int> order;
  if (n_fields == 1) {
    order = {0};
  } else {
    order = cfg.update_order == UpdateOrder::Eps1ThenEps2 ? std::vector<int>{0, 1}
                                                          : std::vector<int>{1, 0};
    if (cfg.freeze_field) {
      std::erase(order, field_index(fields_prev, *cfg.freeze_field));
      if (order.empty())
        throw std::invalid_argument("forward_update: all fields frozen");
    }
  }

  double max_pref = 0.0; // bound over both old and plausible new field values
  for (int j = 0; j < n_nodes; ++j) {
    const double e1 = std::abs(fields_prev[0].samples[j]);
    const double e2 = n_fields == 2 ? std::abs(fields_prev[1].samples[j]) : 0.0;
    max_pref = std::max(max_pref, std::abs(interaction_prefactor(e1, e2, system)));
  }

  std::vector<ControlField> work = fields_prev;
  std::vector<StateVector> psis;
  const ComplexMatrix coupling = system.coupling_op.cast<Complex>();

  for (int sweep_i = 0; sweep_i < static_cast<int>(order.size()); ++sweep_i) {
    const int l = order[sweep_i];
    const int partner = n_fields - 1 - l;

    psis.clear();
    for (int i = 0; i < k; ++i) psis.push_back(targets.pairs[i].first);

    // Conservative spectral bound: updates can grow the field; re-estimate
    // lazily if exceeded would be possible, instead pad generously.
    ChebyshevPropagator prop(system, grid.dt, std::max(max_pref * 4.0, 1e-12), cfg.prop);

    std::vector<StateVector> phis(k);
    for (int j = 0; j < n_nodes; ++j) {
      for (int i = 0; i < k; ++i) phis[i] = backward[i].states[j];
      const double partner_value = n_fields == 2 ? work[partner].samples[j] : 1.0;
      double c_sum = 0.0;
      const double q = system.kind == InteractionKind::Raman ? partner_value : 1.0;
      if (q != 0.0) {
        for (int i = 0; i < k; ++i) {
          const Complex overlap = phis[i].dot(psis[i]);
          const Complex element = psis[i].dot(coupling * phis[i]);
          c_sum += std::imag(overlap * element);
        }
        c_sum *= q;
      }
      const double s_j = cfg.shape.samples[j];
      const double updated = fields_prev[l].samples[j] -
                             s_j / (2.0 * cfg.alpha0) * (gammas[l][j] - c_sum);
      if (!std::isfinite(updated))
        throw std::runtime_error("forward_update: non-finite field update (alpha0 too small?)");
      work[l].samples[j] = updated;

      if (j < grid.n_steps) {
        // Midpoint of the updated node and the not-yet-updated next node.
        const double el_mid = 0.5 * (work[l].samples[j] + fields_prev[l].samples[j + 1]);
        double pref;
        if (n_fields == 2) {
          const double ep_mid = 0.5 * (work[partner].samples[j] + work[partner].samples[j + 1]);
          pref = l == 0 ? interaction_prefactor(el_mid, ep_mid, system)
                        : interaction_prefactor(ep_mid, el_mid, system);
        } else {
          pref = interaction_prefactor(el_mid, 0.0, system);
        }
        for (int i = 0; i < k; ++i) prop.step(psis[i], pref);
      }
    }
  }
  return SweepResult{std::move(work), std::move(psis)};
}

std::vector<ControlField> post_filter(const std::vector<ControlField>& fields,
                                      const std::vector<SpectralFilter>& filters,
                                      std::optional<int> freeze_field) {
  if (fields.size() != filters.size())
    throw std::invalid_argument("post_filter: filter count mismatch");
  std::vector<ControlField> out;
  out.reserve(fields.size());
  for (size_t l = 0; l < fields.size(); ++l) {
    if (freeze_field && fields[l].id == *freeze_field)
      out.push_back(fields[l]);
    else
      out.push_back(apply_fourier_filter(fields[l], filters[l]));
  }
  return out;
}

double monotonicity_residual(const RealVector& delta_eps, const RealVector& gamma,
                             const ShapeFunction& shape, double alpha0, double dt) {
  if (delta_eps.size() != gamma.size() || delta_eps.size() != shape.samples.size())
    throw std::invalid_argument("monotonicity_residual: length mismatch");
  RealVector integrand(delta_eps.size());
  for (int j = 0; j < delta_eps.size(); ++j) {
    const double d = delta_eps[j];
    integrand[j] = alpha0 / shape.samples[j] * d * d + gamma[j] * d;
  }
  return trapz(integrand, dt);
}

FunctionalTerms evaluate_functional(const std::vector<StateVector>& finals,
                                    const TargetSet& targets,
                                    const std::vector<ControlField>& fields,
                                    const std::vector<ControlField>& reference_fields,
                                    const ShapeFunction& shape, double alpha0,
                                    const std::vector<SpectralFilter>& filters,
                                    const TimeGrid& grid) {
  FunctionalTerms terms;
  terms.objective = gate_yield(finals, targets).sum_sq;
  for (size_t l = 0; l < fields.size(); ++l) {
    RealVector integrand(grid.n_nodes());
    for (int j = 0; j < grid.n_nodes(); ++j) {
      const double d = fields[l].samples[j] - reference_fields[l].samples[j];
      integrand[j] = d * d / shape.samples[j];
    }
    terms.energy_penalty += alpha0 * trapz(integrand, grid.dt);
    if (l < filters.size()) {
      const RealVector stopped =
          apply_fourier_filter(fields[l].samples, complement_mask(filters[l]));
      terms.filter_penalty += trapz(stopped.cwiseAbs2(), grid.dt);
    }
  }
  return terms;
}

OptimizationResult iterate(const KrotovProblem& problem, const IterationCallback& on_iteration) {
  const SystemModel& system = problem.system;
  const TimeGrid& grid = problem.grid;
  const KrotovConfig& cfg = problem.cfg;
  const int k = problem.targets.size();
  const int n_fields = system.field_count();

  validate_targets(problem.targets, system.dimension());
  if (static_cast<int>(problem.guess.size()) != n_fields)
    throw std::invalid_argument("iterate: guess field count mismatch");
  for (const auto& f : problem.guess) validate_field(f, grid);
  if (static_cast<int>(cfg.filters.size()) != n_fields)
    throw std::invalid_argument("iterate: need one band-pass filter per field");
  if (cfg.shape.samples.size() != grid.n_nodes())
    throw std::invalid_argument("iterate: shape function grid mismatch");
  if (cfg.alpha0 <= 0.0) throw std::invalid_argument("iterate: alpha0 must be positive");
  if (cfg.freeze_field && n_fields == 1)
    throw std::invalid_argument("iterate: cannot freeze the only field");

  std::vector<SpectralFilter> band_stops;
  for (const auto& f : cfg.filters) band_stops.push_back(complement_mask(f));

  OptimizationResult res;
  std::vector<ControlField> fields = problem.guess;

  auto field_energies = [&](const std::vector<ControlField>& fs) {
    std::vector<double> e;
    for (const auto& f : fs) e.push_back(trapz(f.samples.cwiseAbs2(), grid.dt));
    return e;
  };
  auto oob_fractions = [&](const std::vector<ControlField>& fs) {
    std::vector<double> v;
    for (size_t l = 0; l < fs.size(); ++l) {
      const double energy = fs[l].samples.cwiseAbs2().sum();
      v.push_back(energy > 0.0 ? out_of_band_fraction(fs[l], cfg.filters[l]) : 0.0);
    }
    return v;
  };
  auto push_record = [&](int iter, const YieldReport& y, const FunctionalTerms& terms,
                         std::vector<double> oob, std::vector<double> residuals,
                         const std::vector<ControlField>& fs) {
    IterationRecord rec;
    rec.iter = iter;
    rec.yield_sum_sq = y.sum_sq;
    rec.avg_fidelity = y.avg_fidelity;
    rec.phase_fidelity = y.phase_fidelity;
    rec.functional = terms;
    rec.out_of_band_fraction = std::move(oob);
    rec.monotonicity_residual = std::move(residuals);
    rec.field_energy = field_energies(fs);
    res.records.push_back(rec);
    if (on_iteration) on_iteration(res.records.back());
  };

  // Iteration 0: the (post-filtered view of the) guess as-is.
  std::vector<Trajectory> fwd = propagate_channels(system, fields, problem.targets, grid,
                                                   cfg.prop, false, cfg.threads);
  YieldReport yield = gate_yield(finals_of(fwd), problem.targets);
  push_record(0, yield,
              evaluate_functional(finals_of(fwd), problem.targets, fields, fields,
                                  cfg.shape, cfg.alpha0, cfg.filters, grid),
              oob_fractions(fields), std::vector<double>(n_fields, 0.0), fields);

  if (yield.avg_fidelity >= cfg.yield_target) {
    res.converged = true;
    res.reason = TerminationReason::YieldTarget;
    res.final_fields = fields;
    return res;
  }

  res.reason = TerminationReason::MaxIters;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const std::vector<Trajectory> bwd = propagate_channels(
        system, fields, problem.targets, grid, cfg.prop, true, cfg.threads);

    std::vector<RealVector> gammas(n_fields);
    for (int l = 0; l < n_fields; ++l) {
      if (cfg.freeze_field && fields[l].id == *cfg.freeze_field) {
        gammas[l] = RealVector::Zero(grid.n_nodes());
        continue;
      }
      const RealVector gp = compute_gamma_prime(system, fields, fwd, bwd, grid, fields[l].id);
      gammas[l] = compute_gamma(gp, band_stops[l]);
    }

    SweepResult sweep = forward_update(system, fields, gammas, bwd, problem.targets, cfg, grid);

    std::vector<double> residuals(n_fields, 0.0);
    for (int l = 0; l < n_fields; ++l) {
      const RealVector delta = sweep.fields[l].samples - fields[l].samples;
      residuals[l] = monotonicity_residual(delta, gammas[l], cfg.shape, cfg.alpha0, grid.dt);
    }
    std::vector<double> oob = oob_fractions(sweep.fields);

    const std::vector<ControlField> prev_fields = fields;
    fields = post_filter(sweep.fields, cfg.filters, cfg.freeze_field);

    fwd = propagate_channels(system, fields, problem.targets, grid, cfg.prop, false,
                             cfg.threads);
    const YieldReport new_yield = gate_yield(finals_of(fwd), problem.targets);
    push_record(iter, new_yield,
                evaluate_functional(finals_of(fwd), problem.targets, fields, prev_fields,
                                    cfg.shape, cfg.alpha0, cfg.filters, grid),
                std::move(oob), std::move(residuals), fields);

    if (new_yield.sum_sq < yield.sum_sq - cfg.monotonic_slack * k) {
      res.reason = TerminationReason::NonMonotone;
      break;
    }
    yield = new_yield;

    if (yield.avg_fidelity >= cfg.yield_target) {
      res.converged = true;
      res.reason = TerminationReason::YieldTarget;
      break;
    }
    // Stagnation: relative yield gain below tolerance over the trailing window.
    const int w = cfg.stagnation_window;
    if (static_cast<int>(res.records.size()) > w + 1) {
      const double before =
          res.records[res.records.size() - 1 - w].yield_sum_sq;
      if (yield.sum_sq - before < cfg.stagnation_tol * std::max(yield.sum_sq, 1e-300)) {
        res.reason = TerminationReason::Stagnation;
        break;
      }
    }
  }

  res.final_fields = fields;
  return res;
}

} // namespace bloc
