#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "nashseek/common.hpp"
#include "nashseek/environment.hpp"
#include "nashseek/game.hpp"
#include "nashseek/graph.hpp"

namespace nashseek {

/// Gains of the PI-type extended state observer. Effective observer gains
/// are sigma*k1_i and sigma^2*k2_i; consensus gains are theta*theta_bar_ij.
struct PIGains {
  double sigma = 10.0;
  Vector k1;
  Vector k2;
  double theta = 20.0;
  Matrix theta_bar;

  static PIGains uniform(int n, double sigma, double k1, double k2, double theta) {
    return {sigma, Vector::Constant(n, k1), Vector::Constant(n, k2), theta, Matrix::Ones(n, n)};
  }

  Matrix consensus_gains() const { return theta * theta_bar; }

  void validate(int n) const {
    require(sigma > 0.0 && theta > 0.0, "sigma and theta must be positive");
    require(k1.size() == n && k2.size() == n, "k1 and k2 need one entry per player");
    require(k1.minCoeff() > 0.0 && k2.minCoeff() > 0.0, "k1 and k2 must be positive");
    require(theta_bar.rows() == n && theta_bar.cols() == n, "theta_bar must be N x N");
    require(theta_bar.minCoeff() > 0.0, "theta_bar must be positive");
  }
};

/// Gains of the RISE-type observer. `sgn_smoothing` > 0 replaces sgn(e) by
/// tanh(e / sgn_smoothing).
struct RISEGains {
  Vector ks;
  Vector c;
  Vector beta;
  double theta = 20.0;
  Matrix theta_bar;
  double sgn_smoothing = 0.0;

  static RISEGains uniform(int n, double ks, double c, double beta, double theta) {
    return {Vector::Constant(n, ks), Vector::Constant(n, c), Vector::Constant(n, beta), theta,
            Matrix::Ones(n, n), 0.0};
  }

  Matrix consensus_gains() const { return theta * theta_bar; }

  double signum(double e) const {
    return sgn_smoothing > 0.0 ? std::tanh(e / sgn_smoothing) : sgn(e);
  }

  void validate(int n) const {
    require(theta > 0.0, "theta must be positive");
    require(ks.size() == n && c.size() == n && beta.size() == n,
            "ks, c and beta need one entry per player");
    require(ks.minCoeff() > 0.0 && c.minCoeff() > 0.0 && beta.minCoeff() > 0.0,
            "ks, c and beta must be positive");
    require(theta_bar.rows() == n && theta_bar.cols() == n, "theta_bar must be N x N");
    require(theta_bar.minCoeff() > 0.0, "theta_bar must be positive");
    require(sgn_smoothing >= 0.0, "sgn_smoothing must be nonnegative");
  }
};

using SeekerGains = std::variant<PIGains, RISEGains>;

inline bool is_rise(const SeekerGains& g) { return std::holds_alternative<RISEGains>(g); }

inline Matrix consensus_gains(const SeekerGains& g) {
  return std::visit([](const auto& v) { return v.consensus_gains(); }, g);
}

/// Controller memory. Row i of `y` is player i's estimate of the joint
/// action (N x N*dim); xhat and zhat are stacked per-player observer states.
struct SeekerState {
  Matrix y;
  Vector xhat;
  Vector zhat;
};

enum class EstimateInit {
  // y_ij(0) = x_j(0) when j is a neighbor of i or j == i, else 0.
  NeighborSeeded,
  // y_ij(0) = 0 for all i, j.
  Zero,
  // y_ij(0) = x_j(0) for all i, j (uses non-local information).
  Exact,
};

inline SeekerState initial_seeker_state(const Matrix& weights, const Vector& x0, int dim,
                                        EstimateInit init = EstimateInit::NeighborSeeded) {
  const int n = static_cast<int>(weights.rows());
  require(x0.size() == n * dim, "initial action has wrong length");
  SeekerState s{Matrix::Zero(n, n * dim), x0, Vector::Zero(n * dim)};
  if (init != EstimateInit::Zero) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (init == EstimateInit::Exact || i == j || weights(i, j) > 0.0)
          s.y.block(i, j * dim, 1, dim) = block(x0, j, dim).transpose();
  }
  return s;
}

/// u_i = -df_i/dx_i(y_i) - zhat_i, the gradient evaluated at player i's
/// estimate of the joint action.
inline Vector control(const Game& game, const SeekerState& state, int i) {
  require(i >= 0 && i < game.n_players, "player index out of range");
  require(state.y.rows() == game.n_players && state.y.cols() == game.joint_size(),
          "estimate matrix does not match the game");
  const Vector yi = state.y.row(i).transpose();
  return -partial_grad(game, i, yi) - block(state.zhat, i, game.dim);
}

inline Vector joint_control(const Game& game, const SeekerState& state) {
  Vector u(game.joint_size());
  for (int i = 0; i < game.n_players; ++i) block(u, i, game.dim) = control(game, state, i);
  return u;
}

/// ydot_ij = -theta_ij ( sum_k a_ik (y_ij - y_kj) + a_ij (y_ij - x_j) ),
/// applied to every (i, j) including j == i.
inline Matrix consensus_derivative(const Matrix& y, const Vector& x, const Matrix& weights,
                                   const Matrix& theta, int dim) {
  const auto n = weights.rows();
  require(y.rows() == n && y.cols() == n * dim && x.size() == n * dim,
          "consensus dimensions do not match");
  require(theta.rows() == n && theta.cols() == n, "theta table must be N x N");
  Matrix dy = Matrix::Zero(n, n * dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      auto blk = dy.block(i, j * dim, 1, dim);
      const auto yij = y.block(i, j * dim, 1, dim);
      for (Eigen::Index k = 0; k < n; ++k)
        if (weights(i, k) != 0.0) blk += weights(i, k) * (yij - y.block(k, j * dim, 1, dim));
      if (weights(i, j) != 0.0)
        blk += weights(i, j) * (yij - x.segment(j * dim, dim).transpose());
      blk *= -theta(i, j);
    }
  }
  return dy;
}

struct ObserverDerivative {
  Vector xhat_dot;
  Vector zhat_dot;
};

/// xhat' = u + zhat + sigma k1 (x - xhat),  zhat' = sigma^2 k2 (x - xhat).
inline ObserverDerivative pi_observer_derivative(const SeekerState& state, const Vector& x,
                                                 const Vector& u, const PIGains& gains, int dim) {
  const Vector innovation = x - state.xhat;
  ObserverDerivative out{u + state.zhat, Vector(x.size())};
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const auto i = k / dim;
    out.xhat_dot(k) += gains.sigma * gains.k1(i) * innovation(k);
    out.zhat_dot(k) = gains.sigma * gains.sigma * gains.k2(i) * innovation(k);
  }
  return out;
}

/// xhat' = u + zhat + (ks + c)(x - xhat),
/// zhat' = ks c (x - xhat) + beta sgn(x - xhat), componentwise.
inline ObserverDerivative rise_observer_derivative(const SeekerState& state, const Vector& x,
                                                   const Vector& u, const RISEGains& gains,
                                                   int dim) {
  const Vector innovation = x - state.xhat;
  ObserverDerivative out{u + state.zhat, Vector(x.size())};
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const auto i = k / dim;
    const double e = innovation(k);
    out.xhat_dot(k) += (gains.ks(i) + gains.c(i)) * e;
    out.zhat_dot(k) = gains.ks(i) * gains.c(i) * e + gains.beta(i) * gains.signum(e);
  }
  return out;
}

/// Outcome of the gain checks that can be evaluated numerically.
struct GainReport {
  std::string seeker;
  bool gains_positive = true;
  double monotonicity = 0.0;
  bool monotone = false;
  std::optional<double> beta_bound;  // RISE only
  std::vector<bool> beta_sufficient;
  std::vector<std::string> notes;

  bool beta_ok() const {
    for (bool b : beta_sufficient)
      if (!b) return false;
    return true;
  }
};

inline GainReport gain_condition_report(const Game& game, const Environment& env,
                                        const SeekerGains& gains) {
  GainReport r;
  r.monotonicity = game.monotonicity;
  r.monotone = game.monotonicity > 0.0;
  if (!r.monotone)
    r.notes.push_back("declared monotonicity constant is not positive; equilibrium uniqueness fails");
  const int n = game.n_players;
  try {
    std::visit([n](const auto& g) { g.validate(n); }, gains);
  } catch (const std::invalid_argument& e) {
    r.gains_positive = false;
    r.notes.push_back(e.what());
  }
  if (const auto* pi = std::get_if<PIGains>(&gains)) {
    r.seeker = "pi";
    r.notes.push_back(
        "sigma and theta thresholds are existence constants; tune empirically (sigma=" +
        std::to_string(pi->sigma) + ", theta=" + std::to_string(pi->theta) + ")");
  } else {
    const auto& rise = std::get<RISEGains>(gains);
    r.seeker = "rise";
    if (rise.c.size() == n && rise.c.minCoeff() > 0.0) {
      try {
        r.beta_bound = beta_lower_bound(env, rise.c);
      } catch (const std::invalid_argument& e) {
        r.notes.push_back(e.what());
      }
    }
    if (r.beta_bound) {
      for (Eigen::Index i = 0; i < rise.beta.size(); ++i)
        r.beta_sufficient.push_back(rise.beta(i) >= *r.beta_bound);
      if (!r.beta_ok()) r.notes.push_back("beta below the disturbance-derivative bound");
    } else {
      r.beta_sufficient.assign(static_cast<size_t>(rise.beta.size()), false);
    }
    if (env.varsigma == 1)
      r.notes.push_back(
          "beta bound covers the disturbance part only; unmodeled-term growth is tuned "
          "empirically");
    r.notes.push_back("theta, ks and c thresholds are existence constants; tune empirically");
  }
  return r;
}

}  // namespace nashseek
