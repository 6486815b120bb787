#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bloc/config.hpp"
#include "bloc/run.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string output_dir;
  std::string profile;
  int threads = 0;
  unsigned long seed = 0;
  bool seed_set = false;
  bool threads_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "Path to the run config (JSON)");
  if (needs_config) c->required();
  cmd->add_option("--output-dir", opts.output_dir, "Override the config output directory");
  cmd->add_option("--profile", opts.profile, "Profile override: full, desk or ci")
      ->check(CLI::IsMember({"full", "desk", "ci"}));
  cmd->add_option("--threads", opts.threads, "Worker thread cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "Run seed recorded in the manifest");
}

bloc::RunConfig load_with_overrides(const CommonOpts& opts) {
  bloc::RunConfig cfg = bloc::load_run_config(opts.config_path);
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
  if (!opts.profile.empty()) cfg.profile = bloc::parse_profile(opts.profile);
  if (opts.threads > 0) cfg.threads = opts.threads;
  if (opts.seed != 0) cfg.seed = opts.seed;
  return cfg;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const bloc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bloc::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bloc::kExitUsage;
  } catch (const std::system_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bloc::kExitNoInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bloc::kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bloc::kExitError;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band-limited Krotov optimal control for finite quantum systems"};
  app.require_subcommand(1);

  CommonOpts opt_optimize, opt_propagate, opt_spectrum, opt_check;
  std::string fields_path, spectrum_fields;

  auto* cmd_optimize = app.add_subcommand("optimize", "Run the Krotov optimization");
  add_common(cmd_optimize, opt_optimize);

  auto* cmd_propagate =
      app.add_subcommand("propagate", "Replay stored fields and report populations");
  add_common(cmd_propagate, opt_propagate);
  cmd_propagate->add_option("--fields", fields_path, "Field CSV (t_fs, eps1[, eps2])")
      ->required();

  auto* cmd_spectrum = app.add_subcommand("spectrum", "Power spectra of stored fields");
  add_common(cmd_spectrum, opt_spectrum, /*needs_config=*/false);
  cmd_spectrum->add_option("--fields", spectrum_fields, "Field CSV (t_fs, eps1[, eps2])")
      ->required();

  auto* cmd_check = app.add_subcommand("check", "Validate a config without running");
  add_common(cmd_check, opt_check);

  CLI11_PARSE(app, argc, argv);

  if (cmd_optimize->parsed()) {
    return guarded([&] {
      bloc::RunConfig cfg = load_with_overrides(opt_optimize);
      return bloc::run_optimize(cfg, std::cout).exit_code;
    });
  }
  if (cmd_propagate->parsed()) {
    return guarded([&] {
      bloc::RunConfig cfg = load_with_overrides(opt_propagate);
      return bloc::run_propagate(cfg, fields_path, std::cout);
    });
  }
  if (cmd_spectrum->parsed()) {
    return guarded([&] {
      const std::string out_dir =
          opt_spectrum.output_dir.empty() ? "." : opt_spectrum.output_dir;
      return bloc::run_spectrum(spectrum_fields, out_dir, std::cout);
    });
  }
  if (cmd_check->parsed()) {
    return guarded([&] {
      bloc::RunConfig cfg = load_with_overrides(opt_check);
      return bloc::run_check(cfg, std::cout);
    });
  }
  return bloc::kExitUsage;
}
