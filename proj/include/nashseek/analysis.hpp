#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <vector>

#include "nashseek/common.hpp"
#include "nashseek/game.hpp"
#include "nashseek/sim.hpp"

namespace nashseek {

/// Constant Jacobian of an affine pseudo-gradient.
struct PseudoGradientMatrix {
  Matrix R;
};

inline PseudoGradientMatrix build_R(const ConnectivityGameSpec& spec) {
  spec.validate();
  return {connectivity_jacobian(spec)};
}

struct DominanceReport {
  bool dominant = false;           // |R_kk| > sum_{l != k} |R_kl| on every row
  bool positive_diagonal = false;  // R_kk > 0 on every row
  double margin = 0.0;             // min_k |R_kk| - sum_{l != k} |R_kl|
};

inline DominanceReport check_diagonal_dominance(const Matrix& r) {
  require(r.rows() == r.cols() && r.rows() > 0, "matrix must be square and nonempty");
  DominanceReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  rep.positive_diagonal = true;
  for (Eigen::Index k = 0; k < r.rows(); ++k) {
    const double diag = std::abs(r(k, k));
    const double off = r.row(k).cwiseAbs().sum() - diag;
    rep.margin = std::min(rep.margin, diag - off);
    rep.positive_diagonal = rep.positive_diagonal && r(k, k) > 0.0;
  }
  rep.dominant = rep.margin > 0.0;
  return rep;
}

inline DominanceReport check_diagonal_dominance(const PseudoGradientMatrix& r) {
  return check_diagonal_dominance(r.R);
}

struct MonotonicityEstimate {
  double m = 0.0;
  bool exact = false;  // affine pseudo-gradient: m is lambda_min of the symmetric part
  bool satisfied() const { return m > 0.0; }
};

/// Strong-monotonicity constant of the pseudo-gradient over the box
/// [lo, hi]^{N n}. Affine maps (three random pairs agree with a unit-step
/// Jacobian to 1e-10) get the exact value; otherwise the minimum sampled
/// ratio (x-z)'(F(x)-F(z)) / |x-z|^2 is returned.
inline MonotonicityEstimate monotonicity_constant(const Game& game, double lo, double hi,
                                                  int samples, unsigned seed = 7) {
  require(lo < hi, "box must be nonempty");
  require(samples >= 1, "need at least one sample");
  const int n = game.joint_size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  auto draw = [&] {
    Vector v(n);
    for (int k = 0; k < n; ++k) v(k) = unif(rng);
    return v;
  };

  const Vector base = draw();
  const Vector f_base = pseudo_gradient(game, base);
  Matrix jac(n, n);
  for (int k = 0; k < n; ++k) {
    Vector e = base;
    e(k) += 1.0;
    jac.col(k) = pseudo_gradient(game, e) - f_base;
  }
  bool affine = jac.allFinite();
  for (int p = 0; p < 3 && affine; ++p) {
    const Vector x = draw();
    const Vector z = draw();
    const Vector diff = pseudo_gradient(game, x) - pseudo_gradient(game, z);
    const double resid = (diff - jac * (x - z)).lpNorm<Eigen::Infinity>();
    affine = resid < 1e-10 * std::max(1.0, diff.lpNorm<Eigen::Infinity>());
  }
  if (affine) return {symmetric_part_min_eigenvalue(jac), true};

  double m = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Vector x = draw();
    const Vector z = draw();
    const Vector dx = x - z;
    const double q = dx.dot(pseudo_gradient(game, x) - pseudo_gradient(game, z));
    m = std::min(m, q / dx.squaredNorm());
  }
  return {m, false};
}

struct SweepRow {
  double sigma = 0.0;
  double theta = 0.0;
  double ultimate_bound = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  double divergence_time = std::numeric_limits<double>::quiet_NaN();
};

/// Runs the PI scenario at every (sigma, theta) pair and reports the
/// ultimate bound over the last quarter of the horizon. Rows follow the
/// input order, sigma-major.
inline std::vector<SweepRow> theorem1_sweep(const Scenario& base,
                                            const std::vector<double>& sigma_levels,
                                            const std::vector<double>& theta_levels) {
  require(std::holds_alternative<PIGains>(base.gains), "sweep needs a PI scenario");
  require(base.env.varsigma == 0, "sweep needs varsigma = 0");
  require(!sigma_levels.empty() && !theta_levels.empty(), "sweep needs at least one level");
  const Vector nash = solve_nash(base.game, Vector::Zero(base.game.joint_size())).x;

  std::vector<std::future<SweepRow>> jobs;
  for (double sigma : sigma_levels) {
    for (double theta : theta_levels) {
      Scenario sc = base;
      auto& g = std::get<PIGains>(sc.gains);
      g.sigma = sigma;
      g.theta = theta;
      jobs.push_back(std::async(std::launch::async, [sc = std::move(sc), nash, sigma, theta] {
        SweepRow row{sigma, theta};
        try {
          const Trajectory tr = run(sc, nash);
          row.ultimate_bound = ultimate_bound(tr, tail_window(tr));
        } catch (const DivergenceError& e) {
          row.diverged = true;
          row.divergence_time = e.time();
        }
        return row;
      }));
    }
  }
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

}  // namespace nashseek
