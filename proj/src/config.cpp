#include "bloc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bloc/units.hpp"

namespace bloc {

using nlohmann::json;

Profile parse_profile(const std::string& name) {
  if (name == "full") return Profile::Full;
  if (name == "desk") return Profile::Desk;
  if (name == "ci") return Profile::Ci;
  throw ConfigError("unknown profile: " + name);
}

std::string profile_name(Profile p) {
  switch (p) {
    case Profile::Full: return "full";
    case Profile::Desk: return "desk";
    case Profile::Ci: return "ci";
  }
  return "?";
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::system_error(ENOENT, std::generic_category(), path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    RunConfig cfg;
    cfg.raw_text = json_text;
    cfg.schema_version = j.at("schema_version").get<int>();
    if (cfg.schema_version != 1)
      throw ConfigError("unsupported schema_version");
    if (j.contains("profile")) cfg.profile = parse_profile(j["profile"].get<std::string>());

    const json& sys = j.at("system");
    const std::string kind = sys.at("kind").get<std::string>();
    if (kind == "two_mode_raman") {
      TwoModeParams p;
      p.nu1_cm = sys.value("nu1_cm", p.nu1_cm);
      p.nu2_cm = sys.value("nu2_cm", p.nu2_cm);
      p.d1_cm = sys.value("d1_cm", p.d1_cm);
      p.d2_cm = sys.value("d2_cm", p.d2_cm);
      p.d12_cm = sys.value("d12_cm", p.d12_cm);
      p.n_states = sys.value("n_states", p.n_states);
      p.alpha_lin1 = sys.value("alpha_lin1", p.alpha_lin1);
      p.alpha_lin2 = sys.value("alpha_lin2", p.alpha_lin2);
      p.alpha_static = sys.value("alpha_static", p.alpha_static);
      p.degeneracy_guard_cm = sys.value("degeneracy_guard_cm", p.degeneracy_guard_cm);
      cfg.two_mode = p;
    } else if (kind == "dipole") {
      const auto energies = sys.at("energies_cm").get<std::vector<double>>();
      const auto rows = sys.at("dipole").get<std::vector<std::vector<double>>>();
      const int n = static_cast<int>(energies.size());
      RealVector e(n);
      for (int i = 0; i < n; ++i) e[i] = energies[i];
      RealMatrix mu(n, n);
      if (static_cast<int>(rows.size()) != n) throw ConfigError("dipole matrix shape");
      for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n) throw ConfigError("dipole matrix shape");
        for (int c = 0; c < n; ++c) mu(r, c) = rows[r][c];
      }
      cfg.dipole_system = std::make_pair(e, mu);
    } else if (kind == "path") {
      cfg.system_path = sys.at("path").get<std::string>();
    } else {
      throw ConfigError("unknown system kind: " + kind);
    }

    if (j.contains("gate")) cfg.gate = parse_gate(j["gate"].get<std::string>());

    const json& grid = j.at("grid");
    cfg.total_time_fs = grid.at("total_time_fs").get<double>();
    if (grid.contains("n_steps"))
      cfg.n_steps = grid["n_steps"].get<int>();
    else
      cfg.n_steps = static_cast<int>(std::ceil(cfg.total_time_fs / grid.at("dt_fs").get<double>()));

    for (const json& g : j.at("guess_fields")) {
      GuessFieldSpec spec;
      spec.carrier_cm = g.at("carrier_cm").get<double>();
      spec.amplitude_au = g.at("amplitude_au").get<double>();
      spec.center_fs = g.value("center_fs", cfg.total_time_fs / 2.0);
      spec.fwhm_fs = g.value("fwhm_fs", cfg.total_time_fs / 3.0);
      cfg.guess_fields.push_back(spec);
    }
    for (const json& f : j.at("filters")) {
      FilterSpec spec;
      spec.all_pass = f.value("all_pass", false);
      spec.edge_width_cm = f.value("edge_width_cm", spec.edge_width_cm);
      if (f.contains("windows_cm"))
        for (const auto& w : f["windows_cm"])
          spec.windows_cm.emplace_back(w.at(0).get<double>(), w.at(1).get<double>());
      cfg.filters.push_back(spec);
    }

    if (j.contains("krotov")) {
      const json& k = j["krotov"];
      cfg.alpha0 = k.value("alpha0", cfg.alpha0);
      cfg.max_iters = k.value("max_iters", cfg.max_iters);
      cfg.yield_target = k.value("yield_target", cfg.yield_target);
      if (k.contains("shape"))
        cfg.shape_form = k["shape"].get<std::string>() == "flattop"
                             ? ShapeForm::FlatTopCosineEdges
                             : ShapeForm::SinSquared;
      cfg.s_min = k.value("s_min", cfg.s_min);
      if (k.contains("freeze_field") && !k["freeze_field"].is_null())
        cfg.freeze_field = k["freeze_field"].get<int>();
      if (k.contains("update_order"))
        cfg.update_order = k["update_order"].get<std::string>() == "eps2_then_eps1"
                               ? UpdateOrder::Eps2ThenEps1
                               : UpdateOrder::Eps1ThenEps2;
      cfg.prop.cheb_tolerance = k.value("cheb_tolerance", cfg.prop.cheb_tolerance);
      cfg.prop.spectral_margin = k.value("spectral_margin", cfg.prop.spectral_margin);
    }

    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.record_stride = j.value("record_stride", cfg.record_stride);
    cfg.checkpoint_interval = j.value("checkpoint_interval", cfg.checkpoint_interval);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.allow_coarse_dt = j.value("allow_coarse_dt", false);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

ResolvedRun resolve_run(const RunConfig& cfg, std::vector<std::string>* warnings) {
  ResolvedRun run;

  if (cfg.two_mode) {
    RamanSystem sys = build_two_mode_raman_system(*cfg.two_mode);
    run.system = std::move(sys.model);
    run.qubits = sys.qubits;
  } else if (cfg.dipole_system) {
    run.system = build_nlevel_dipole(cfg.dipole_system->first, cfg.dipole_system->second);
  } else if (cfg.system_path) {
    std::ifstream in(*cfg.system_path);
    if (!in) throw std::system_error(ENOENT, std::generic_category(), *cfg.system_path);
    std::stringstream ss;
    ss << in.rdbuf();
    run.system = system_from_json(ss.str());
  } else {
    throw ConfigError("no system specified");
  }

  if (cfg.total_time_fs <= 0.0) throw ConfigError("total_time_fs must be positive");
  if (cfg.n_steps < 2) throw ConfigError("n_steps must be >= 2");
  run.grid = TimeGrid::from_total_time(units::fs_to_au(cfg.total_time_fs), cfg.n_steps);

  const int n_fields = run.system.field_count();
  if (static_cast<int>(cfg.guess_fields.size()) != n_fields)
    throw ConfigError("guess field count does not match interaction kind");
  if (static_cast<int>(cfg.filters.size()) != n_fields)
    throw ConfigError("filter count does not match interaction kind");

  // Build filters and find the highest band edge for the dt rule.
  double nu_max = 0.0;
  for (int l = 0; l < n_fields; ++l) {
    const FilterSpec& spec = cfg.filters[l];
    SpectralFilter filter = spec.all_pass
                                ? SpectralFilter::all_pass(run.grid)
                                : band_pass_mask(spec.windows_cm, spec.edge_width_cm, run.grid);
    for (const auto& [lo, hi] : spec.windows_cm)
      nu_max = std::max(nu_max, hi + spec.edge_width_cm);
    run.krotov.filters.push_back(std::move(filter));
    nu_max = std::max(nu_max, cfg.guess_fields[l].carrier_cm);
  }

  // dt must resolve the fastest carrier: dt <= period(nu_max) / 20.
  if (nu_max > 0.0) {
    const double period_au = 2.0 * M_PI / units::cm_to_hartree(nu_max);
    if (run.grid.dt > period_au / 20.0 * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "dt = " << units::au_to_fs(run.grid.dt) << " fs does not resolve "
          << nu_max << " cm^-1 (need dt <= " << units::au_to_fs(period_au / 20.0)
          << " fs)";
      if (!cfg.allow_coarse_dt) throw ConfigError(msg.str());
      if (warnings) warnings->push_back("coarse dt override: " + msg.str());
    }
  }

  for (int l = 0; l < n_fields; ++l) {
    const GuessFieldSpec& g = cfg.guess_fields[l];
    run.guess.push_back(gaussian_guess(g.carrier_cm, g.amplitude_au,
                                       units::fs_to_au(g.center_fs),
                                       units::fs_to_au(g.fwhm_fs), run.grid, l + 1));
  }

  if (run.qubits) {
    run.targets = gate_targets(cfg.gate, *run.qubits, run.system);
  } else {
    // Dipole runs drive the lowest transition |0> -> |1> unless a gate on a
    // four-state basis is requested explicitly via a Raman system.
    StateVector ini = StateVector::Zero(run.system.dimension());
    StateVector tgt = StateVector::Zero(run.system.dimension());
    ini[0] = 1.0;
    tgt[1] = 1.0;
    run.targets.pairs.emplace_back(ini, tgt);
  }

  run.krotov.alpha0 = cfg.alpha0;
  run.krotov.max_iters = cfg.max_iters;
  run.krotov.yield_target = cfg.yield_target;
  run.krotov.shape = shape_function(run.grid, cfg.shape_form, cfg.s_min);
  run.krotov.freeze_field = cfg.freeze_field;
  run.krotov.update_order = cfg.update_order;
  run.krotov.prop = cfg.prop;
  run.krotov.threads = cfg.threads;
  return run;
}

std::string config_hash(const std::string& text) {
  // FNV-1a, 64 bit.
  unsigned long long h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

} // namespace bloc
