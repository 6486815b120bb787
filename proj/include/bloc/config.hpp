#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bloc/core.hpp"
#include "bloc/krotov.hpp"
#include "bloc/models.hpp"

namespace bloc {

/// Exit-code contract shared by the CLI and the run orchestration.
enum ExitCode {
  kExitOk = 0,
  kExitError = 1,
  kExitMaxIters = 2,
  kExitNonMonotone = 3,
  kExitUsage = 64,
  kExitDataError = 65,
  kExitNoInput = 66,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GuessFieldSpec {
  double carrier_cm = 0.0;
  double amplitude_au = 0.0;
  double center_fs = 0.0;
  double fwhm_fs = 0.0;
};

struct FilterSpec {
  bool all_pass = false;
  std::vector<std::pair<double, double>> windows_cm;
  double edge_width_cm = 100.0;
};

enum class Profile { Full, Desk, Ci };

Profile parse_profile(const std::string& name);
std::string profile_name(Profile p);

/// Fully resolved run configuration. Parsed from the JSON config file and
/// cross-validated (Nyquist, filter windows, qubit-level guard) before any
/// propagation starts.
struct RunConfig {
  int schema_version = 1;
  Profile profile = Profile::Ci;

  // system: either inline two-mode Raman params, inline dipole, or a path
  std::optional<TwoModeParams> two_mode;
  std::optional<std::pair<RealVector, RealMatrix>> dipole_system; // energies cm^-1, dipole
  std::optional<std::string> system_path;

  Gate gate = Gate::CNOT;
  double total_time_fs = 0.0;
  int n_steps = 0;

  std::vector<GuessFieldSpec> guess_fields;
  std::vector<FilterSpec> filters;

  // krotov parameters
  double alpha0 = 10.0;
  int max_iters = 100;
  double yield_target = 0.99;
  ShapeForm shape_form = ShapeForm::SinSquared;
  double s_min = 1e-3;
  std::optional<int> freeze_field;
  UpdateOrder update_order = UpdateOrder::Eps1ThenEps2;
  PropagatorConfig prop;

  std::string output_dir = ".";
  int record_stride = 1;
  int checkpoint_interval = 0; // 0 disables checkpoints
  int threads = 1;
  unsigned long seed = 0;
  bool allow_coarse_dt = false;

  std::string raw_text; // original config text, hashed into the manifest
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

/// Materialized problem: system, targets, grid, guesses, filters.
struct ResolvedRun {
  SystemModel system;
  std::optional<QubitBasisMap> qubits;
  TargetSet targets;
  TimeGrid grid;
  std::vector<ControlField> guess;
  KrotovConfig krotov;
};

/// Builds and cross-validates the run. Throws ConfigError on violations;
/// emits warnings (returned as strings) for overridden checks.
ResolvedRun resolve_run(const RunConfig& cfg, std::vector<std::string>* warnings = nullptr);

/// FNV-1a hash of the raw config text, hex-encoded; recorded in the manifest.
std::string config_hash(const std::string& text);

} // namespace bloc
