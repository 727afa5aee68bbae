#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nashseek/environment.hpp"
#include "nashseek/game.hpp"
#include "nashseek/graph.hpp"
#include "nashseek/seeker.hpp"
#include "nashseek/sim.hpp"

namespace nashseek {

/// Pass/fail thresholds checked by `run_preset`. Every statistic is taken
/// over `window`.
struct Expectations {
  TimeWindow window{15.0, 20.0};
  std::optional<double> tail_error_inf;      // sup |xi|_inf over the window
  std::optional<double> final_error_inf;     // |xi(t_end)|_inf
  std::optional<double> observer_tail_error; // sup |zeta2|_inf over the window
  std::optional<double> ultimate_bound;      // sup |[zeta; eta; xi]|_2 over the window
};

struct Preset {
  std::string name;
  std::string description;
  Scenario scenario;
  Expectations expect;
};

namespace presets {

// Tuned defaults; see README for the rationale.
inline constexpr double kSigma = 10.0;
inline constexpr double kK1 = 30.0;
inline constexpr double kK2 = 400.0;
inline constexpr double kTheta = 20.0;
inline constexpr double kKs = 50.0;
inline constexpr double kC = 50.0;
inline constexpr double kBetaFactor = 1.2;
inline constexpr double kSgnSmoothing = 1e-5;

inline Vector sensor_initial_action() {
  return Vector{{-10.0, 2.0, -3.0, -8.0, -5.0, 6.0, 0.0, -8.0, -1.0, 10.0}};
}

inline PIGains default_pi_gains(int n) { return PIGains::uniform(n, kSigma, kK1, kK2, kTheta); }

/// RISE gains with beta at kBetaFactor times the advisor bound.
inline RISEGains default_rise_gains(const Environment& env) {
  const int n = env.n_players();
  RISEGains g = RISEGains::uniform(n, kKs, kC, 1.0, kTheta);
  g.beta.setConstant(kBetaFactor * beta_lower_bound(env, g.c));
  g.sgn_smoothing = kSgnSmoothing;
  return g;
}

inline Scenario sensor_scenario(const std::string& name, bool nonquadratic, int varsigma,
                                bool rise, bool disrupted) {
  Scenario sc;
  sc.name = name;
  sc.game = nonquadratic ? build_nonquadratic_example() : build_sensor_network_game();
  sc.env = make_environment(varsigma, graded_sinusoids(5, 2),
                            varsigma == 1 ? "sensor_coupling" : "none");
  sc.graph = disrupted ? ring_with_chord({{0.01, 2.0, 0.0}}) : ring_with_chord();
  if (rise)
    sc.gains = default_rise_gains(sc.env);
  else
    sc.gains = default_pi_gains(5);
  sc.x0 = sensor_initial_action();
  sc.t0 = 0.0;
  sc.t_end = 20.0;
  sc.dt = 1e-4;
  sc.record_every = 10;
  return sc;
}

inline Expectations pi_expectations() {
  Expectations e;
  e.tail_error_inf = 0.05;
  e.ultimate_bound = 0.5;
  return e;
}

inline Expectations rise_expectations() {
  Expectations e;
  e.final_error_inf = 1e-2;
  e.observer_tail_error = 1e-2;
  return e;
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> all = {
      "example1_pi",        "example1_pi_disrupted",       "example2_pi",
      "example1_rise",      "example2_rise",               "example2_rise_disrupted",
      "nonquadratic_pi",    "nonquadratic_rise",           "nonquadratic_pi_disrupted",
      "nonquadratic_rise_disrupted"};
  return all;
}

}  // namespace presets

/// Named scenario with its expected outcomes, or nullopt for unknown names.
inline std::optional<Preset> make_preset(const std::string& name) {
  struct Row {
    const char* name;
    bool nonquadratic;
    int varsigma;
    bool rise;
    bool disrupted;
    const char* description;
  };
  static const Row rows[] = {
      {"example1_pi", false, 0, false, false,
       "sensor game, sinusoidal disturbances, PI observer"},
      {"example1_pi_disrupted", false, 0, false, true,
       "sensor game, sinusoidal disturbances, PI observer, no communication on (0.01, 2)"},
      {"example2_pi", false, 1, false, false,
       "sensor game, unmodeled terms plus disturbances, PI observer"},
      {"example1_rise", false, 0, true, false,
       "sensor game, sinusoidal disturbances, RISE observer"},
      {"example2_rise", false, 1, true, false,
       "sensor game, unmodeled terms plus disturbances, RISE observer"},
      {"example2_rise_disrupted", false, 1, true, true,
       "sensor game, unmodeled terms plus disturbances, RISE observer, no communication on "
       "(0.01, 2)"},
      {"nonquadratic_pi", true, 0, false, false,
       "non-quadratic game, sinusoidal disturbances, PI observer"},
      {"nonquadratic_rise", true, 1, true, false,
       "non-quadratic game, unmodeled terms plus disturbances, RISE observer"},
      {"nonquadratic_pi_disrupted", true, 0, false, true,
       "non-quadratic game, sinusoidal disturbances, PI observer, no communication on (0.01, 2)"},
      {"nonquadratic_rise_disrupted", true, 1, true, true,
       "non-quadratic game, unmodeled terms plus disturbances, RISE observer, no communication "
       "on (0.01, 2)"},
  };
  for (const auto& r : rows) {
    if (name != r.name) continue;
    return Preset{r.name, r.description,
                  presets::sensor_scenario(r.name, r.nonquadratic, r.varsigma, r.rise, r.disrupted),
                  r.rise ? presets::rise_expectations() : presets::pi_expectations()};
  }
  return std::nullopt;
}

}  // namespace nashseek
