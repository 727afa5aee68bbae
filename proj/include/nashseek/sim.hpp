#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "nashseek/common.hpp"
#include "nashseek/environment.hpp"
#include "nashseek/game.hpp"
#include "nashseek/graph.hpp"
#include "nashseek/seeker.hpp"

namespace nashseek {

struct Scenario {
  std::string name = "scenario";
  Game game;
  Environment env;
  CommGraph graph = ring_with_chord();
  SeekerGains gains = PIGains{};
  Vector x0;
  double t0 = 0.0;
  double t_end = 20.0;
  double dt = 1e-4;
  int record_every = 100;
  bool record_estimates = false;
  EstimateInit estimate_init = EstimateInit::NeighborSeeded;

  void validate() const {
    require(dt > 0.0, "dt must be positive");
    require(t_end > t0, "t_end must exceed t0");
    require(t0 >= 0.0, "t0 must be nonnegative");
    require(record_every >= 1, "record_every must be at least 1");
    require(game.n_players == graph.n_players(), "game and graph disagree on N");
    require(env.n_players() == game.n_players, "environment and game disagree on N");
    require(env.dim == game.dim, "environment and game disagree on dimension");
    require(x0.size() == game.joint_size(), "x0 has wrong length");
    env.validate();
    std::visit([&](const auto& g) { g.validate(game.n_players); }, gains);
  }
};

/// Plant action plus controller memory.
struct FullState {
  Vector x;
  SeekerState seeker;

  FullState& operator+=(const FullState& o) {
    x += o.x;
    seeker.y += o.seeker.y;
    seeker.xhat += o.seeker.xhat;
    seeker.zhat += o.seeker.zhat;
    return *this;
  }
  friend FullState operator*(double a, const FullState& s) {
    return {a * s.x, {a * s.seeker.y, a * s.seeker.xhat, a * s.seeker.zhat}};
  }
  friend FullState operator+(FullState a, const FullState& b) { return a += b; }

  bool all_finite() const {
    return x.allFinite() && seeker.y.allFinite() && seeker.xhat.allFinite() &&
           seeker.zhat.allFinite();
  }
};

inline FullState initial_state(const Scenario& sc) {
  return {sc.x0, initial_seeker_state(sc.graph.weights(), sc.x0, sc.game.dim, sc.estimate_init)};
}

/// Vector field of the closed loop under fixed communication weights.
inline FullState closed_loop_derivative(const Scenario& sc, const FullState& s, double t,
                                        const Matrix& weights) {
  const int dim = sc.game.dim;
  const Vector u = joint_control(sc.game, s.seeker);
  FullState d;
  d.x = plant_derivative(sc.env, s.x, u, t);
  d.seeker.y = consensus_derivative(s.seeker.y, s.x, weights, consensus_gains(sc.gains), dim);
  const auto obs = std::visit(
      [&](const auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, PIGains>)
          return pi_observer_derivative(s.seeker, s.x, u, g, dim);
        else
          return rise_observer_derivative(s.seeker, s.x, u, g, dim);
      },
      sc.gains);
  d.seeker.xhat = obs.xhat_dot;
  d.seeker.zhat = obs.zhat_dot;
  return d;
}

/// Classical fourth-order Runge-Kutta step for any state type closed under
/// addition and scalar multiplication. Returns the step and its stage states.
template <typename State, typename Field>
State rk4_step(Field&& f, double t, const State& s, double dt,
               std::array<State, 3>* stages = nullptr) {
  const State k1 = f(t, s);
  State s2 = s + (0.5 * dt) * k1;
  const State k2 = f(t + 0.5 * dt, s2);
  State s3 = s + (0.5 * dt) * k2;
  const State k3 = f(t + 0.5 * dt, s3);
  State s4 = s + dt * k3;
  const State k4 = f(t + dt, s4);
  State next = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (stages) *stages = {std::move(s2), std::move(s3), std::move(s4)};
  return next;
}

namespace detail {

inline bool innovation_sign_changed(const Vector& ref, const FullState& s) {
  const Vector e = s.x - s.seeker.xhat;
  for (Eigen::Index k = 0; k < e.size(); ++k)
    if (sgn(e(k)) != ref(k)) return true;
  return false;
}

}  // namespace detail

/// One classical RK4 step. Window edges are expected on the step grid, so
/// the weights are sampled once at the step midpoint and held over all
/// stages. For an exact signum (RISE, sgn_smoothing == 0) the step falls
/// back to explicit Euler when any innovation component changes sign across
/// the stage states.
inline FullState step(const Scenario& sc, const FullState& s, double t, double dt) {
  require(dt > 0.0, "dt must be positive");
  const Matrix w = sc.graph.effective_weights(t + 0.5 * dt);
  auto field = [&](double tau, const FullState& st) { return closed_loop_derivative(sc, st, tau, w); };
  std::array<FullState, 3> stages;
  FullState next = rk4_step(field, t, s, dt, &stages);

  const auto* rise = std::get_if<RISEGains>(&sc.gains);
  if (rise && rise->sgn_smoothing == 0.0) {
    const Vector ref = (s.x - s.seeker.xhat).unaryExpr([](double v) { return sgn(v); });
    bool changed = detail::innovation_sign_changed(ref, next);
    for (const auto& st : stages) changed = changed || detail::innovation_sign_changed(ref, st);
    if (changed) next = s + dt * field(t, s);
  }
  if (!next.all_finite())
    throw DivergenceError(t + dt, "non-finite state at t=" + std::to_string(t + dt));
  return next;
}

/// Recorded closed-loop run. Derived error signals are recomputed from the
/// recorded primaries by `derive_errors`.
struct Trajectory {
  std::string name;
  bool rise = false;
  int n_players = 0;
  int dim = 1;
  Vector nash;
  Vector ks;  // RISE only, for gamma

  std::vector<double> times;
  std::vector<Vector> x, xhat, zhat, z;
  std::vector<Matrix> y;  // filled when estimates are recorded
  std::vector<double> eta_norm;

  std::vector<Vector> xi, zeta1, zeta2, gamma;

  size_t size() const { return times.size(); }
};

struct DerivedErrors {
  Vector xi, zeta1, zeta2, gamma;
};

/// xi = x - x*, zeta1 = x - xhat, zeta2 = z - zhat, gamma = -ks zeta1 + zeta2.
inline DerivedErrors derive_errors(const Vector& x, const Vector& xhat, const Vector& zhat,
                                   const Vector& z, const Vector& nash, const Vector* ks,
                                   int dim) {
  DerivedErrors e{x - nash, x - xhat, z - zhat, Vector()};
  if (ks) {
    e.gamma = e.zeta2;
    for (Eigen::Index k = 0; k < e.gamma.size(); ++k) e.gamma(k) -= (*ks)(k / dim) * e.zeta1(k);
  }
  return e;
}

/// Frobenius norm of eta_ij = y_ij - x_j over all (i, j).
inline double estimate_error_norm(const Matrix& y, const Vector& x) {
  return (y.rowwise() - x.transpose()).norm();
}

constexpr double kDivergenceThreshold = 1e8;

inline void record_sample(Trajectory& tr, const Scenario& sc, const FullState& s, double t) {
  tr.times.push_back(t);
  tr.x.push_back(s.x);
  tr.xhat.push_back(s.seeker.xhat);
  tr.zhat.push_back(s.seeker.zhat);
  tr.z.push_back(extended_state(sc.env, s.x, t));
  if (sc.record_estimates) tr.y.push_back(s.seeker.y);
  tr.eta_norm.push_back(estimate_error_norm(s.seeker.y, s.x));
  auto e = derive_errors(s.x, s.seeker.xhat, s.seeker.zhat, tr.z.back(), tr.nash,
                         tr.rise ? &tr.ks : nullptr, sc.game.dim);
  tr.xi.push_back(std::move(e.xi));
  tr.zeta1.push_back(std::move(e.zeta1));
  tr.zeta2.push_back(std::move(e.zeta2));
  if (tr.rise) tr.gamma.push_back(std::move(e.gamma));
}

/// Integrates the scenario with the equilibrium supplied by the caller.
inline Trajectory run(const Scenario& input, const Vector& nash) {
  input.validate();
  require(nash.size() == input.game.joint_size(), "equilibrium has wrong length");
  Scenario sc = input;
  sc.graph = input.graph.snapped(sc.t0, sc.dt);

  Trajectory tr;
  tr.name = sc.name;
  tr.n_players = sc.game.n_players;
  tr.dim = sc.game.dim;
  tr.nash = nash;
  if (const auto* rise = std::get_if<RISEGains>(&sc.gains)) {
    tr.rise = true;
    tr.ks = rise->ks;
  }

  const long steps = std::lround((sc.t_end - sc.t0) / sc.dt);
  FullState s = initial_state(sc);
  record_sample(tr, sc, s, sc.t0);
  for (long k = 0; k < steps; ++k) {
    const double t = sc.t0 + static_cast<double>(k) * sc.dt;
    s = step(sc, s, t, sc.dt);
    const double t_next = sc.t0 + static_cast<double>(k + 1) * sc.dt;
    if (s.x.lpNorm<Eigen::Infinity>() > kDivergenceThreshold)
      throw DivergenceError(t_next, "divergence at t=" + std::to_string(t_next));
    if ((k + 1) % sc.record_every == 0 || k + 1 == steps) record_sample(tr, sc, s, t_next);
  }
  return tr;
}

/// Integrates the scenario against the gradient-play equilibrium.
inline Trajectory run(const Scenario& sc) {
  const Vector start = Vector::Zero(sc.game.joint_size());
  return run(sc, solve_nash(sc.game, start).x);
}

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

inline TimeWindow tail_window(const Trajectory& tr) {
  require(!tr.times.empty(), "empty trajectory");
  const double t0 = tr.times.front();
  const double t1 = tr.times.back();
  return {t0 + 0.75 * (t1 - t0), t1};
}

/// Sample indices with begin <= t <= end (up to a small tolerance).
inline std::vector<size_t> window_indices(const Trajectory& tr, TimeWindow w) {
  require(w.begin < w.end, "window needs begin < end");
  require(!tr.times.empty(), "empty trajectory");
  const double slack = 1e-9 * std::max(1.0, std::abs(tr.times.back()));
  require(w.begin >= tr.times.front() - slack && w.end <= tr.times.back() + slack,
          "window lies outside the trajectory");
  std::vector<size_t> idx;
  for (size_t k = 0; k < tr.times.size(); ++k)
    if (tr.times[k] >= w.begin - slack && tr.times[k] <= w.end + slack) idx.push_back(k);
  require(!idx.empty(), "window contains no samples");
  return idx;
}

/// sup over the window of |[zeta1; zeta2; eta; xi]|_2.
inline double ultimate_bound(const Trajectory& tr, TimeWindow w) {
  double sup = 0.0;
  for (size_t k : window_indices(tr, w)) {
    const double sq = tr.zeta1[k].squaredNorm() + tr.zeta2[k].squaredNorm() +
                      tr.eta_norm[k] * tr.eta_norm[k] + tr.xi[k].squaredNorm();
    sup = std::max(sup, std::sqrt(sq));
  }
  return sup;
}

/// sup over the window of the infinity norm of a recorded series.
inline double window_sup_inf(const Trajectory& tr, const std::vector<Vector>& series,
                             TimeWindow w) {
  double sup = 0.0;
  for (size_t k : window_indices(tr, w)) sup = std::max(sup, series[k].lpNorm<Eigen::Infinity>());
  return sup;
}

}  // namespace nashseek
