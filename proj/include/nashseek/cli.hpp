#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nashseek/analysis.hpp"
#include "nashseek/io.hpp"
#include "nashseek/presets.hpp"
#include "nashseek/sim.hpp"

namespace nashseek::cli {

enum ExitCode : int {
  kOk = 0,
  kOutcomeViolation = 1,
  kBadInput = 2,
  kDiverged = 3,
};

struct Options {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::string out = "out";
  std::vector<std::string> overrides;
  std::optional<std::string> sweep_axis;
  std::vector<double> sweep_levels;
  bool record_estimates = false;
  bool dump_config = false;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

/// Runs, writes trajectory.csv / estimates.csv / summary.json into `out`,
/// and returns the summary.
inline json simulate_and_write(const Scenario& sc, const std::filesystem::path& out,
                               const std::optional<Expectations>& expect, std::ostream& log) {
  std::filesystem::create_directories(out);
  const Trajectory tr = run(sc);
  const TimeWindow window = expect ? expect->window : tail_window(tr);
  const io::RunStatistics stats = io::statistics(tr, window);
  json summary = io::summary_json(tr, stats, gain_condition_report(sc.game, sc.env, sc.gains));
  if (expect) {
    const auto check = io::check_expectations(stats, *expect);
    summary["expectations"] = io::expectations_json(*expect);
    summary["expectations"]["passed"] = check.passed;
    summary["expectations"]["failures"] = check.failures;
  }
  {
    std::ofstream csv(out / "trajectory.csv");
    io::write_trajectory_csv(csv, tr);
  }
  if (sc.record_estimates) {
    std::ofstream csv(out / "estimates.csv");
    io::write_estimates_csv(csv, tr);
  }
  write_file(out / "summary.json", summary.dump(2) + "\n");
  log << sc.name << ": final_error_inf=" << io::fmt17(stats.final_error_inf)
      << " ultimate_bound=" << io::fmt17(stats.ultimate_bound)
      << " observer_tail_error=" << io::fmt17(stats.observer_tail_error) << '\n';
  return summary;
}

}  // namespace detail

inline int run_preset(const std::string& name, const std::filesystem::path& out,
                      bool record_estimates = false, std::ostream& log = std::cout) {
  auto preset = make_preset(name);
  if (!preset) {
    log << "unknown preset '" << name << "'\n";
    return kBadInput;
  }
  preset->scenario.record_estimates = record_estimates;
  try {
    const json summary = detail::simulate_and_write(preset->scenario, out, preset->expect, log);
    if (!summary["expectations"]["passed"].get<bool>()) {
      for (const auto& f : summary["expectations"]["failures"]) log << "  " << f.get<std::string>() << '\n';
      return kOutcomeViolation;
    }
    return kOk;
  } catch (const DivergenceError& e) {
    log << e.what() << '\n';
    return kDiverged;
  }
}

/// Loads a scenario file and applies KEY=VALUE overrides.
inline Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  json j = io::read_json_file(path);
  for (const auto& o : overrides) io::apply_override(j, o);
  return io::scenario_from_json(j);
}

inline int run_config(const std::string& path, const std::vector<std::string>& overrides,
                      const std::filesystem::path& out, bool record_estimates = false,
                      std::ostream& log = std::cout) {
  Scenario sc;
  try {
    sc = load_scenario(path, overrides);
  } catch (const SchemaError& e) {
    log << e.what() << '\n';
    return kBadInput;
  }
  sc.record_estimates = sc.record_estimates || record_estimates;
  try {
    detail::simulate_and_write(sc, out, std::nullopt, log);
    return kOk;
  } catch (const DivergenceError& e) {
    log << e.what() << '\n';
    return kDiverged;
  }
}

/// Sweeps `axis` ("sigma" or "theta") of a PI scenario; writes sweep.csv.
inline int sweep(const Scenario& base, const std::string& axis, const std::vector<double>& levels,
                 const std::filesystem::path& out, std::ostream& log = std::cout) {
  const auto* pi = std::get_if<PIGains>(&base.gains);
  if (!pi) {
    log << "sweeps need a PI scenario\n";
    return kBadInput;
  }
  if (axis != "sigma" && axis != "theta") {
    log << "sweep axis '" << axis << "' is not a PI gain (use sigma or theta)\n";
    return kBadInput;
  }
  if (levels.empty()) {
    log << "no sweep levels given\n";
    return kBadInput;
  }
  if (base.env.varsigma != 0) {
    log << "sweeps need varsigma = 0\n";
    return kBadInput;
  }
  const auto rows = axis == "sigma" ? theorem1_sweep(base, levels, {pi->theta})
                                    : theorem1_sweep(base, {pi->sigma}, levels);
  std::filesystem::create_directories(out);
  std::ofstream csv(out / "sweep.csv");
  io::write_sweep_csv(csv, rows);
  for (const auto& r : rows)
    log << "sigma=" << r.sigma << " theta=" << r.theta << " ultimate_bound="
        << (r.diverged ? std::string("diverged") : io::fmt17(r.ultimate_bound)) << '\n';
  return kOk;
}

inline int dispatch(const Options& opt, std::ostream& log = std::cout) {
  if (opt.preset.has_value() == opt.config.has_value()) {
    log << "give exactly one of --preset or --config\n";
    return kBadInput;
  }
  if (opt.preset && !opt.overrides.empty()) {
    log << "--set applies to --config runs; dump the preset with --dump-config first\n";
    return kBadInput;
  }
  if (opt.dump_config) {
    if (!opt.preset) {
      log << "--dump-config needs --preset\n";
      return kBadInput;
    }
    auto p = make_preset(*opt.preset);
    if (!p) {
      log << "unknown preset '" << *opt.preset << "'\n";
      return kBadInput;
    }
    std::cout << io::to_json(p->scenario).dump(2) << '\n';
    return kOk;
  }
  if (opt.sweep_axis) {
    Scenario base;
    if (opt.preset) {
      auto p = make_preset(*opt.preset);
      if (!p) {
        log << "unknown preset '" << *opt.preset << "'\n";
        return kBadInput;
      }
      base = p->scenario;
    } else {
      try {
        base = load_scenario(*opt.config, opt.overrides);
      } catch (const SchemaError& e) {
        log << e.what() << '\n';
        return kBadInput;
      }
    }
    return sweep(base, *opt.sweep_axis, opt.sweep_levels, opt.out, log);
  }
  if (opt.preset) return run_preset(*opt.preset, opt.out, opt.record_estimates, log);
  return run_config(*opt.config, opt.overrides, opt.out, opt.record_estimates, log);
}

}  // namespace nashseek::cli
