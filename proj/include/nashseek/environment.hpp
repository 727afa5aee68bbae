#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nashseek/common.hpp"

namespace nashseek {

/// Additive disturbance d_i(t) acting on every component of one player's
/// action, with analytic first and second derivatives and sup bounds on
/// their l1 norms over t >= t0.
struct DisturbanceSignal {
  enum class Kind { Zero, Sinusoid };

  Kind kind = Kind::Zero;
  int dim = 1;
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s; d(t) = A sin(w t)
  double sup_deriv_l1 = 0.0;
  std::optional<double> sup_deriv2_l1 = 0.0;

  static DisturbanceSignal zero(int dim) {
    DisturbanceSignal s;
    s.dim = dim;
    return s;
  }

  static DisturbanceSignal sinusoid(int dim, double amplitude, double frequency) {
    DisturbanceSignal s;
    s.kind = Kind::Sinusoid;
    s.dim = dim;
    s.amplitude = amplitude;
    s.frequency = frequency;
    s.sup_deriv_l1 = dim * std::abs(amplitude * frequency);
    s.sup_deriv2_l1 = dim * std::abs(amplitude * frequency * frequency);
    return s;
  }

  Vector value(double t) const {
    if (kind == Kind::Zero) return Vector::Zero(dim);
    return Vector::Constant(dim, amplitude * std::sin(frequency * t));
  }
  Vector deriv(double t) const {
    if (kind == Kind::Zero) return Vector::Zero(dim);
    return Vector::Constant(dim, amplitude * frequency * std::cos(frequency * t));
  }
  Vector deriv2(double t) const {
    if (kind == Kind::Zero) return Vector::Zero(dim);
    return Vector::Constant(dim, -amplitude * frequency * frequency * std::sin(frequency * t));
  }
};

/// Unmodeled coupling term g_i(x) of one player. Only named builtins exist.
struct UnmodeledTerm {
  std::string name = "none";
  std::function<Vector(const Vector&)> g;

  Vector operator()(const Vector& x) const { return g(x); }
};

namespace unmodeled {

inline UnmodeledTerm none(int dim) {
  return {"none", [dim](const Vector&) -> Vector { return Vector::Zero(dim); }};
}

/// Coupling terms of the five-sensor example (x_ij is component j of
/// sensor i):
///   sensor 1: (x21, x22)        sensor 2: (x11^2 + x31, x22)
///   sensor 3: (x31, x32)        sensor 4: (x41, x42)
///   sensor 5: (x51, x52)
inline UnmodeledTerm sensor_coupling(int player) {
  require(player >= 0 && player < 5, "sensor_coupling is defined for five players");
  std::function<Vector(const Vector&)> g;
  switch (player) {
    case 0:
      g = [](const Vector& x) -> Vector { return Vector{{x(2), x(3)}}; };
      break;
    case 1:
      g = [](const Vector& x) -> Vector { return Vector{{x(0) * x(0) + x(4), x(3)}}; };
      break;
    default:
      g = [player](const Vector& x) -> Vector { return x.segment(2 * player, 2); };
      break;
  }
  return {"sensor_coupling", std::move(g)};
}

inline std::vector<UnmodeledTerm> builtin(const std::string& name, int n_players, int dim) {
  std::vector<UnmodeledTerm> out;
  if (name == "none") {
    for (int i = 0; i < n_players; ++i) out.push_back(none(dim));
  } else if (name == "sensor_coupling") {
    require(n_players == 5 && dim == 2, "sensor_coupling needs 5 players with dim 2");
    for (int i = 0; i < n_players; ++i) out.push_back(sensor_coupling(i));
  } else {
    throw std::invalid_argument("unknown unmodeled term '" + name + "'");
  }
  return out;
}

}  // namespace unmodeled

/// True plant: xdot_i = u_i + s * g_i(x) + d_i(t) with s in {0, 1}.
struct Environment {
  int varsigma = 0;
  int dim = 1;
  std::vector<DisturbanceSignal> disturbances;
  std::vector<UnmodeledTerm> unmodeled;
  std::string unmodeled_name = "none";

  int n_players() const { return static_cast<int>(disturbances.size()); }

  void validate() const {
    require(varsigma == 0 || varsigma == 1, "varsigma must be 0 or 1");
    require(!disturbances.empty(), "environment needs one disturbance per player");
    for (const auto& d : disturbances) require(d.dim == dim, "disturbance dimension mismatch");
    if (varsigma == 1)
      require(unmodeled.size() == disturbances.size(),
              "environment needs one unmodeled term per player");
  }
};

inline Environment make_environment(int varsigma, std::vector<DisturbanceSignal> disturbances,
                                    const std::string& unmodeled_name = "none") {
  require(!disturbances.empty(), "environment needs at least one player");
  Environment env;
  env.varsigma = varsigma;
  env.dim = disturbances.front().dim;
  env.unmodeled = unmodeled::builtin(unmodeled_name, static_cast<int>(disturbances.size()), env.dim);
  env.disturbances = std::move(disturbances);
  env.unmodeled_name = unmodeled_name;
  env.validate();
  return env;
}

/// Player i's sinusoid has amplitude i and frequency i (1-based).
inline std::vector<DisturbanceSignal> graded_sinusoids(int n_players, int dim) {
  std::vector<DisturbanceSignal> out;
  for (int i = 1; i <= n_players; ++i)
    out.push_back(DisturbanceSignal::sinusoid(dim, static_cast<double>(i), static_cast<double>(i)));
  return out;
}

/// Lumped unknown z_i = s * g_i(x) + d_i(t), stacked over players.
inline Vector extended_state(const Environment& env, const Vector& x, double t) {
  const int d = env.dim;
  require(x.size() == env.n_players() * d, "joint action has wrong length");
  Vector z(x.size());
  for (int i = 0; i < env.n_players(); ++i) {
    Vector zi = env.disturbances[static_cast<size_t>(i)].value(t);
    if (env.varsigma == 1) zi += env.unmodeled[static_cast<size_t>(i)](x);
    block(z, i, d) = zi;
  }
  return z;
}

inline Vector plant_derivative(const Environment& env, const Vector& x, const Vector& u, double t) {
  require(u.size() == x.size(), "control and action dimensions differ");
  return u + extended_state(env, x, t);
}

/// Smallest signum gain covering the disturbance part of the extended
/// state:  max(c) * sum_i sup|d_i'|_1 / min(c) + sum_i sup|d_i''|_1 / min(c).
inline double beta_lower_bound(const Environment& env, const Vector& c) {
  require(c.size() == env.n_players(), "one c_i per player required");
  require(c.minCoeff() > 0.0, "c_i must be positive");
  double d1 = 0.0;
  double d2 = 0.0;
  for (const auto& d : env.disturbances) {
    if (!d.sup_deriv2_l1)
      throw std::invalid_argument("disturbance lacks a second-derivative bound");
    d1 += d.sup_deriv_l1;
    d2 += *d.sup_deriv2_l1;
  }
  return c.maxCoeff() * d1 / c.minCoeff() + d2 / c.minCoeff();
}

}  // namespace nashseek
