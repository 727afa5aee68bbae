#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nashseek/common.hpp"

namespace nashseek {

/// Quadratic sensor connectivity game:
///   f_i(x) = x_i' R_ii x_i + x_i' r_i + b_i + sum_j c_ij |x_i - x_j|^2
/// where j ranges over the physical neighbors {j : c_ij > 0}.
struct ConnectivityGameSpec {
  int dim = 2;
  std::vector<Matrix> r_self;  // R_ii, symmetric positive definite
  std::vector<Vector> r_lin;   // r_i
  std::vector<double> b;       // b_i
  Matrix coupling;             // c_ij, zero diagonal

  int n_players() const { return static_cast<int>(r_self.size()); }

  std::vector<int> physical_neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < n_players(); ++j)
      if (coupling(i, j) > 0.0) out.push_back(j);
    return out;
  }

  void validate() const {
    const int n = n_players();
    require(n > 0, "connectivity game needs at least one player");
    require(dim > 0, "action dimension must be positive");
    require(static_cast<int>(r_lin.size()) == n && static_cast<int>(b.size()) == n,
            "r_i and b_i must be given for every player");
    require(coupling.rows() == n && coupling.cols() == n, "coupling must be N x N");
    for (int i = 0; i < n; ++i) {
      const Matrix& r = r_self[static_cast<size_t>(i)];
      require(r.rows() == dim && r.cols() == dim, "R_ii must be dim x dim");
      require(r_lin[static_cast<size_t>(i)].size() == dim, "r_i must have length dim");
      require(r.isApprox(r.transpose(), 0.0), "R_ii must be symmetric");
      for (int k = 0; k < dim; ++k) {
        const double off = r.row(k).cwiseAbs().sum() - std::abs(r(k, k));
        require(r(k, k) > off, "R_ii must be strictly diagonally dominant");
      }
      require(Eigen::LLT<Matrix>(r).info() == Eigen::Success,
              "R_ii must be positive definite");
      require(coupling(i, i) == 0.0, "coupling must have a zero diagonal");
      for (int j = 0; j < n; ++j)
        require(coupling(i, j) >= 0.0 && std::isfinite(coupling(i, j)),
                "couplings must be nonnegative");
    }
  }
};

/// N-player game with analytic partial gradients. Stateless and shareable.
struct Game {
  std::string name;
  int n_players = 0;
  int dim = 1;
  std::vector<std::function<double(const Vector&)>> objectives;
  std::vector<std::function<Vector(const Vector&)>> partial_grads;
  // Declared strong-monotonicity constant of the pseudo-gradient.
  double monotonicity = 0.0;
  // Set for affine games built from a connectivity spec.
  std::optional<ConnectivityGameSpec> connectivity;

  int joint_size() const { return n_players * dim; }
};

inline Vector partial_grad(const Game& game, int i, const Vector& v) {
  require(i >= 0 && i < game.n_players, "player index out of range");
  require(v.size() == game.joint_size(), "joint action has wrong length");
  return game.partial_grads[static_cast<size_t>(i)](v);
}

/// Stacked partial gradients (the pseudo-gradient).
inline Vector pseudo_gradient(const Game& game, const Vector& v) {
  require(v.size() == game.joint_size(), "joint action has wrong length");
  Vector out(game.joint_size());
  for (int i = 0; i < game.n_players; ++i)
    block(out, i, game.dim) = game.partial_grads[static_cast<size_t>(i)](v);
  return out;
}

/// Constant Jacobian of the connectivity game's pseudo-gradient: diagonal
/// blocks 2R_ii + 2 sum_j c_ij I, off-diagonal blocks -2 c_ij I.
inline Matrix connectivity_jacobian(const ConnectivityGameSpec& spec) {
  const int n = spec.n_players();
  const int d = spec.dim;
  Matrix r = Matrix::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i) {
    const double h = 2.0 * spec.coupling.row(i).sum();
    r.block(i * d, i * d, d, d) =
        2.0 * spec.r_self[static_cast<size_t>(i)] + h * Matrix::Identity(d, d);
    for (int j = 0; j < n; ++j)
      if (j != i && spec.coupling(i, j) > 0.0)
        r.block(i * d, j * d, d, d) = -2.0 * spec.coupling(i, j) * Matrix::Identity(d, d);
  }
  return r;
}

/// Smallest eigenvalue of the symmetric part of a square matrix.
inline double symmetric_part_min_eigenvalue(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

inline Game build_connectivity_game(const ConnectivityGameSpec& spec) {
  spec.validate();
  Game g;
  g.name = "connectivity";
  g.n_players = spec.n_players();
  g.dim = spec.dim;
  const int d = spec.dim;
  for (int i = 0; i < g.n_players; ++i) {
    const auto neighbors = spec.physical_neighbors(i);
    g.objectives.push_back([spec, i, d, neighbors](const Vector& x) {
      const auto xi = block(x, i, d);
      double f = xi.dot(spec.r_self[static_cast<size_t>(i)] * xi) +
                 xi.dot(spec.r_lin[static_cast<size_t>(i)]) + spec.b[static_cast<size_t>(i)];
      for (int j : neighbors) f += spec.coupling(i, j) * (xi - block(x, j, d)).squaredNorm();
      return f;
    });
    g.partial_grads.push_back([spec, i, d, neighbors](const Vector& x) -> Vector {
      const auto xi = block(x, i, d);
      Vector grad = 2.0 * spec.r_self[static_cast<size_t>(i)] * xi + spec.r_lin[static_cast<size_t>(i)];
      for (int j : neighbors) grad += 2.0 * spec.coupling(i, j) * (xi - block(x, j, d));
      return grad;
    });
  }
  g.monotonicity = symmetric_part_min_eigenvalue(connectivity_jacobian(spec));
  g.connectivity = spec;
  return g;
}

/// Five-sensor game with R_ii = i*I, r_i = (i, i), b_i = i and unit
/// couplings 1->2, 2->3, 3->2, 4->2, 4->5, 5->1. Equilibrium at -1/2.
inline ConnectivityGameSpec sensor_network_spec() {
  ConnectivityGameSpec s;
  s.dim = 2;
  for (int i = 1; i <= 5; ++i) {
    s.r_self.push_back(static_cast<double>(i) * Matrix::Identity(2, 2));
    s.r_lin.push_back(Vector::Constant(2, static_cast<double>(i)));
    s.b.push_back(static_cast<double>(i));
  }
  s.coupling = Matrix::Zero(5, 5);
  s.coupling(0, 1) = 1.0;
  s.coupling(1, 2) = 1.0;
  s.coupling(2, 1) = 1.0;
  s.coupling(3, 1) = 1.0;
  s.coupling(3, 4) = 1.0;
  s.coupling(4, 0) = 1.0;
  return s;
}

inline Game build_sensor_network_game() {
  Game g = build_connectivity_game(sensor_network_spec());
  g.name = "sensor_network";
  return g;
}

/// Sensor network game with player 1's cost augmented by 10 exp(x_11).
/// The added term has a positive semidefinite Hessian, so the quadratic
/// game's monotonicity constant remains a valid lower bound.
inline Game build_nonquadratic_example() {
  Game g = build_sensor_network_game();
  g.name = "nonquadratic";
  auto f1 = g.objectives[0];
  auto grad1 = g.partial_grads[0];
  g.objectives[0] = [f1](const Vector& x) { return f1(x) + 10.0 * std::exp(x(0)); };
  g.partial_grads[0] = [grad1](const Vector& x) -> Vector {
    Vector grad = grad1(x);
    grad(0) += 10.0 * std::exp(x(0));
    return grad;
  };
  g.connectivity.reset();
  return g;
}

struct NashSolution {
  Vector x;
  double residual = 0.0;  // infinity norm of the pseudo-gradient at x
  long iterations = 0;
};

/// Damped gradient play x <- x - alpha * F(x). A step is accepted only if it
/// lowers |F|_2; otherwise alpha is halved. Steps are clipped to |dx|_inf <= 1.
inline NashSolution solve_nash(const Game& game, const Vector& x0, double tol = 1e-10,
                               long max_iter = 1'000'000) {
  require(tol > 0.0, "tolerance must be positive");
  require(x0.size() == game.joint_size(), "initial point has wrong length");
  constexpr double kMaxStep = 1.0;
  constexpr double kMaxAlpha = 1.0;

  Vector x = x0;
  Vector grad = pseudo_gradient(game, x);
  double norm2 = grad.norm();
  double alpha = 0.1;
  long it = 0;
  for (; it < max_iter; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() <= tol) break;
    Vector step = -alpha * grad;
    const double len = step.lpNorm<Eigen::Infinity>();
    if (len > kMaxStep) step *= kMaxStep / len;
    const Vector trial = x + step;
    const Vector trial_grad = pseudo_gradient(game, trial);
    const double trial_norm2 = trial_grad.norm();
    if (!std::isfinite(trial_norm2) || trial_norm2 >= norm2) {
      alpha *= 0.5;
      if (alpha < 1e-300) break;
      continue;
    }
    x = trial;
    grad = trial_grad;
    norm2 = trial_norm2;
    alpha = std::min(alpha * 1.2, kMaxAlpha);
  }
  const double residual = grad.lpNorm<Eigen::Infinity>();
  if (!(residual <= tol))
    throw ConvergenceError(residual, it,
                           "gradient play did not converge; residual " + std::to_string(residual));
  return {x, residual, it};
}

}  // namespace nashseek
