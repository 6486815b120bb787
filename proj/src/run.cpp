#include "bloc/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bloc/units.hpp"

namespace bloc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw std::system_error(ENOENT, std::generic_category(), path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (first) {
      first = false;
      if (header) {
        while (std::getline(ss, cell, ',')) header->push_back(cell);
      }
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::runtime_error("malformed CSV cell in " + path + ": " + cell);
      }
      if (pos != cell.size())
        throw std::runtime_error("malformed CSV cell in " + path + ": " + cell);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_fields_csv(const std::string& path, const std::vector<ControlField>& fields,
                      const TimeGrid& grid) {
  std::vector<std::string> header = {"t_fs"};
  for (const auto& f : fields) header.push_back("eps" + std::to_string(f.id));
  std::vector<std::vector<double>> rows;
  rows.reserve(grid.n_nodes());
  for (int j = 0; j < grid.n_nodes(); ++j) {
    std::vector<double> row = {units::au_to_fs(grid.node(j))};
    for (const auto& f : fields) row.push_back(f.samples[j]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

std::vector<ControlField> read_fields_csv(const std::string& path, const TimeGrid& grid) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  if (header.size() < 2 || rows.empty())
    throw std::runtime_error("field CSV has no data: " + path);
  if (static_cast<int>(rows.size()) != grid.n_nodes())
    throw std::runtime_error("field CSV does not match grid: " + path);
  const int n_fields = static_cast<int>(header.size()) - 1;
  std::vector<ControlField> fields(n_fields);
  for (int l = 0; l < n_fields; ++l) {
    fields[l].id = l + 1;
    fields[l].samples.resize(grid.n_nodes());
  }
  for (int j = 0; j < grid.n_nodes(); ++j) {
    const double t_au = units::fs_to_au(rows[j][0]);
    if (std::abs(t_au - grid.node(j)) > 1e-6 * grid.dt + 1e-9)
      throw std::runtime_error("field CSV time axis does not match grid: " + path);
    if (static_cast<int>(rows[j].size()) != n_fields + 1)
      throw std::runtime_error("ragged field CSV: " + path);
    for (int l = 0; l < n_fields; ++l) fields[l].samples[j] = rows[j][l + 1];
  }
  return fields;
}

namespace {

const std::vector<std::string> kTraceHeader = {
    "iter",          "yield_sum_sq",  "avg_fidelity", "phase_fidelity",
    "out_of_band_1", "out_of_band_2", "residual_1",   "residual_2"};

std::vector<double> trace_row(const IterationRecord& rec) {
  auto at = [](const std::vector<double>& v, size_t i) {
    return i < v.size() ? v[i] : 0.0;
  };
  return {static_cast<double>(rec.iter),
          rec.yield_sum_sq,
          rec.avg_fidelity,
          rec.phase_fidelity,
          at(rec.out_of_band_fraction, 0),
          at(rec.out_of_band_fraction, 1),
          at(rec.monotonicity_residual, 0),
          at(rec.monotonicity_residual, 1)};
}

void write_spectra_and_masks(const fs::path& dir, const std::vector<ControlField>& fields,
                             const std::vector<SpectralFilter>& filters,
                             const TimeGrid& grid) {
  for (size_t l = 0; l < fields.size(); ++l) {
    const std::string suffix = "field" + std::to_string(fields[l].id) + ".csv";
    if (fields[l].samples.cwiseAbs2().sum() > 0.0) {
      std::vector<std::vector<double>> rows;
      for (const auto& pt : power_spectrum(fields[l], grid))
        rows.push_back({pt.nu_cm, pt.power});
      write_csv((dir / ("spectrum_" + suffix)).string(), {"omega_cm", "power"}, rows);
    }
    if (l < filters.size()) {
      const SpectralFilter& f = filters[l];
      std::vector<std::vector<double>> rows;
      const int n = static_cast<int>(f.mask.size());
      for (int k = 0; k <= n / 2; ++k)
        rows.push_back({bin_frequency_cm(grid, k, n), f.mask[k]});
      write_csv((dir / ("mask_" + suffix)).string(), {"omega_cm", "value"}, rows);
    }
  }
}

} // namespace

RunOutcome run_optimize(const RunConfig& cfg, std::ostream& log) {
  std::vector<std::string> warnings;
  ResolvedRun run = resolve_run(cfg, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << "\n";

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  std::ofstream trace((dir / "trace.csv").string());
  if (!trace) throw std::runtime_error("cannot open trace.csv in " + cfg.output_dir);
  for (size_t i = 0; i < kTraceHeader.size(); ++i)
    trace << (i ? "," : "") << kTraceHeader[i];
  trace << "\n";

  KrotovProblem problem{run.system, run.targets, run.grid, run.guess, run.krotov};
  int iter_count = 0;
  auto on_iteration = [&](const IterationRecord& rec) {
    const auto row = trace_row(rec);
    for (size_t i = 0; i < row.size(); ++i)
      trace << (i ? "," : "") << (i == 0 ? std::to_string(rec.iter) : format_double(row[i]));
    trace << "\n";
    trace.flush();
    iter_count = rec.iter;
    if (cfg.checkpoint_interval > 0 && rec.iter > 0 &&
        rec.iter % cfg.checkpoint_interval == 0)
      log << "iter " << rec.iter << ": yield " << format_double(rec.yield_sum_sq) << "\n";
  };

  OptimizationResult result = iterate(problem, on_iteration);
  trace.close();

  write_fields_csv((dir / "fields.csv").string(), result.final_fields, run.grid);
  write_spectra_and_masks(dir, result.final_fields, run.krotov.filters, run.grid);

  const IterationRecord& last = result.records.back();
  json manifest;
  manifest["schema_version"] = 1;
  manifest["config_hash"] = config_hash(cfg.raw_text);
  manifest["profile"] = profile_name(cfg.profile);
  manifest["seed"] = cfg.seed;
  manifest["threads"] = cfg.threads;
  manifest["iterations"] = iter_count;
  manifest["converged"] = result.converged;
  manifest["termination_reason"] = termination_reason_name(result.reason);
  manifest["yield_sum_sq"] = last.yield_sum_sq;
  manifest["avg_fidelity"] = last.avg_fidelity;
  manifest["phase_fidelity"] = last.phase_fidelity;
  {
    std::ofstream mf((dir / "manifest.json").string());
    mf << manifest.dump(2) << "\n";
  }

  log << "termination: " << termination_reason_name(result.reason)
      << ", avg_fidelity = " << format_double(last.avg_fidelity) << "\n";

  RunOutcome outcome;
  outcome.result = std::move(result);
  switch (outcome.result.reason) {
    case TerminationReason::YieldTarget: outcome.exit_code = kExitOk; break;
    case TerminationReason::Stagnation:
    case TerminationReason::MaxIters: outcome.exit_code = kExitMaxIters; break;
    case TerminationReason::NonMonotone: outcome.exit_code = kExitNonMonotone; break;
  }
  return outcome;
}

int run_propagate(const RunConfig& cfg, const std::string& fields_path, std::ostream& log) {
  ResolvedRun run = resolve_run(cfg);
  const auto fields = read_fields_csv(fields_path, run.grid);
  if (static_cast<int>(fields.size()) != run.system.field_count())
    throw std::runtime_error("field count in CSV does not match system");

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  // Record populations of the qubit basis states (or all states for small
  // dipole systems) every record_stride nodes.
  std::vector<int> watch;
  std::vector<std::string> header = {"t_fs"};
  if (run.qubits) {
    const auto idx = run.qubits->indices();
    watch.assign(idx.begin(), idx.end());
    header.insert(header.end(), {"p00", "p01", "p10", "p11"});
  } else {
    for (int i = 0; i < std::min(run.system.dimension(), 4); ++i) {
      watch.push_back(i);
      header.push_back("p" + std::to_string(i));
    }
  }

  const int stride = std::max(1, cfg.record_stride);
  std::vector<StateVector> finals;
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < run.targets.size(); ++k) {
    const Trajectory traj = propagate(run.system, fields, run.targets.pairs[k].first,
                                      run.grid, run.krotov.prop, stride);
    if (k == 0) {
      for (size_t i = 0; i < traj.states.size(); ++i) {
        const int node = std::min(static_cast<int>(i) * stride, run.grid.n_steps);
        std::vector<double> row = {units::au_to_fs(run.grid.node(node))};
        for (int w : watch) row.push_back(std::norm(traj.states[i][w]));
        rows.push_back(std::move(row));
      }
    }
    finals.push_back(traj.final_state());
  }
  write_csv((dir / "populations.csv").string(), header, rows);

  const YieldReport y = gate_yield(finals, run.targets);
  json out;
  out["yield_sum_sq"] = y.sum_sq;
  out["avg_fidelity"] = y.avg_fidelity;
  out["phase_fidelity"] = y.phase_fidelity;
  {
    std::ofstream yf((dir / "yields.json").string());
    yf << out.dump(2) << "\n";
  }
  log << "avg_fidelity = " << format_double(y.avg_fidelity) << "\n";
  return kExitOk;
}

int run_spectrum(const std::string& fields_path, const std::string& output_dir,
                 std::ostream& log) {
  std::vector<std::string> header;
  const auto rows = read_csv(fields_path, &header);
  if (rows.size() < 3 || header.size() < 2)
    throw std::runtime_error("field CSV has no usable data: " + fields_path);
  const double dt_fs = rows[1][0] - rows[0][0];
  if (dt_fs <= 0.0) throw std::runtime_error("non-increasing time axis: " + fields_path);
  const TimeGrid grid(static_cast<int>(rows.size()) - 1, units::fs_to_au(dt_fs));
  const auto fields = read_fields_csv(fields_path, grid);

  const fs::path dir(output_dir);
  fs::create_directories(dir);
  for (const auto& f : fields) {
    std::vector<std::vector<double>> out;
    for (const auto& pt : power_spectrum(f, grid)) out.push_back({pt.nu_cm, pt.power});
    const std::string name = "spectrum_field" + std::to_string(f.id) + ".csv";
    write_csv((dir / name).string(), {"omega_cm", "power"}, out);
    log << name << ": " << out.size() << " bins\n";
  }
  return kExitOk;
}

int run_check(const RunConfig& cfg, std::ostream& log) {
  std::vector<std::string> warnings;
  ResolvedRun run = resolve_run(cfg, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << "\n";

  log << "profile: " << profile_name(cfg.profile) << "\n";
  log << "dimension: " << run.system.dimension() << "\n";
  log << "grid: n_steps = " << run.grid.n_steps
      << ", dt = " << format_double(units::au_to_fs(run.grid.dt)) << " fs, T = "
      << format_double(units::au_to_fs(run.grid.total_time())) << " fs\n";
  log << "nyquist: " << format_double(run.grid.nyquist_cm()) << " cm^-1\n";
  for (size_t l = 0; l < run.krotov.filters.size(); ++l) {
    const auto& f = run.krotov.filters[l];
    log << "filter " << l + 1 << ": ";
    if (f.is_all_pass) {
      log << "all-pass";
    } else {
      for (const auto& [lo, hi] : f.windows_cm) log << "[" << lo << ", " << hi << "] ";
      log << "edge " << f.edge_width_cm << " cm^-1, pass bins "
          << (f.mask.array() > 0.5).count();
    }
    log << "\n";
  }
  if (run.qubits) {
    const auto idx = run.qubits->indices();
    const char* names[] = {"|00>", "|01>", "|10>", "|11>"};
    log << "qubit transitions (cm^-1):\n";
    auto e_cm = [&](int i) { return units::hartree_to_cm(run.system.energies[i]); };
    log << "  |00>-|01>: " << format_double(e_cm(idx[1]) - e_cm(idx[0])) << "\n";
    log << "  |10>-|11>: " << format_double(e_cm(idx[3]) - e_cm(idx[2])) << "\n";
    log << "  |00>-|10>: " << format_double(e_cm(idx[2]) - e_cm(idx[0])) << "\n";
    log << "  |01>-|11>: " << format_double(e_cm(idx[3]) - e_cm(idx[1])) << "\n";
    for (int q = 0; q < 4; ++q)
      log << "  " << names[q] << " index " << idx[q] << ", E = "
          << format_double(e_cm(idx[q])) << " cm^-1\n";
  }
  log << "targets: " << run.targets.size() << " channels, gate " << gate_name(cfg.gate)
      << "\n";
  return kExitOk;
}

} // namespace bloc
