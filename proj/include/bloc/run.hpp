#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bloc/config.hpp"
#include "bloc/krotov.hpp"

namespace bloc {

/// CSV helpers. All floats are written with 17 significant digits so files
/// round-trip losslessly.
std::string format_double(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header = nullptr);

/// Field files are CSV with columns t_fs, eps1[, eps2].
void write_fields_csv(const std::string& path, const std::vector<ControlField>& fields,
                      const TimeGrid& grid);
std::vector<ControlField> read_fields_csv(const std::string& path, const TimeGrid& grid);

struct RunOutcome {
  int exit_code = kExitOk;
  OptimizationResult result;
};

/// Drives krotov::iterate and writes the run artifacts into output_dir:
/// manifest.json, trace.csv, fields.csv, spectrum_field<l>.csv,
/// mask_field<l>.csv, plus periodic checkpoints.
RunOutcome run_optimize(const RunConfig& cfg, std::ostream& log);

/// Replays stored fields: writes qubit-state populations over time and
/// final yields.
int run_propagate(const RunConfig& cfg, const std::string& fields_path, std::ostream& log);

/// Power spectra of the fields in a CSV file (grid inferred from the file).
int run_spectrum(const std::string& fields_path, const std::string& output_dir,
                 std::ostream& log);

/// Validation-only pass: prints resolved grid, Nyquist, filter bins and the
/// qubit transition table.
int run_check(const RunConfig& cfg, std::ostream& log);

} // namespace bloc
