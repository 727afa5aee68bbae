#pragma once

#include <cmath>
#include <queue>
#include <tuple>
#include <vector>

#include "nashseek/common.hpp"

namespace nashseek {

/// Time window during which every communication weight is multiplied by
/// `scale`. Active on the open interval (t_start, t_end).
struct DisruptionWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  double scale = 0.0;

  bool active(double t) const { return t > t_start && t < t_end; }
};

namespace detail {

inline void check_weight_matrix(const Matrix& w) {
  require(w.rows() == w.cols(), "weight matrix must be square");
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    require(w(i, i) == 0.0, "weight matrix must have a zero diagonal");
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      require(std::isfinite(w(i, j)) && w(i, j) >= 0.0,
              "weights must be finite and nonnegative");
      require(w(i, j) == w(j, i), "weight matrix must be symmetric");
    }
  }
}

}  // namespace detail

/// Graph Laplacian D - A of a symmetric weight matrix.
inline Matrix laplacian(const Matrix& w) {
  detail::check_weight_matrix(w);
  Matrix lap = -w;
  lap.diagonal() = w.rowwise().sum();
  return lap;
}

/// Breadth-first reachability over edges with positive weight.
inline bool is_connected(const Matrix& w) {
  const auto n = w.rows();
  if (n == 0) return false;
  std::vector<bool> seen(static_cast<size_t>(n), false);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = true;
  Eigen::Index reached = 1;
  while (!frontier.empty()) {
    const auto i = frontier.front();
    frontier.pop();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (w(i, j) > 0.0 && !seen[static_cast<size_t>(j)]) {
        seen[static_cast<size_t>(j)] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n;
}

/// Undirected weighted communication topology with disruption schedule.
/// Immutable after construction.
class CommGraph {
 public:
  using Edge = std::tuple<int, int, double>;  // 0-based endpoints, weight

  explicit CommGraph(Matrix weights, std::vector<DisruptionWindow> disruptions = {})
      : weights_(std::move(weights)), disruptions_(std::move(disruptions)) {
    detail::check_weight_matrix(weights_);
    require(weights_.rows() > 0, "graph needs at least one player");
    require(is_connected(weights_), "communication graph must be connected");
    for (const auto& d : disruptions_) {
      require(d.t_start < d.t_end, "disruption window needs t_start < t_end");
      require(d.scale >= 0.0 && d.scale <= 1.0, "disruption scale must lie in [0, 1]");
    }
  }

  static CommGraph from_edges(int n, const std::vector<Edge>& edges,
                              std::vector<DisruptionWindow> disruptions = {}) {
    require(n > 0, "graph needs at least one player");
    Matrix w = Matrix::Zero(n, n);
    for (const auto& [i, j, a] : edges) {
      require(i >= 0 && i < n && j >= 0 && j < n, "edge endpoint out of range");
      require(i != j, "self loops are not allowed");
      require(a > 0.0, "edge weights must be positive");
      w(i, j) = a;
      w(j, i) = a;
    }
    return CommGraph(std::move(w), std::move(disruptions));
  }

  int n_players() const { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  const std::vector<DisruptionWindow>& disruptions() const { return disruptions_; }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < n_players(); ++i)
      for (int j = i + 1; j < n_players(); ++j)
        if (weights_(i, j) > 0.0) out.emplace_back(i, j, weights_(i, j));
    return out;
  }

  /// Product of the scales of every window active at t.
  double scale_at(double t) const {
    double s = 1.0;
    for (const auto& d : disruptions_)
      if (d.active(t)) s *= d.scale;
    return s;
  }

  Matrix effective_weights(double t) const {
    require(t >= 0.0, "time must be nonnegative");
    return weights_ * scale_at(t);
  }

  /// Copy whose window edges sit on the step grid t0 + k*dt.
  CommGraph snapped(double t0, double dt) const {
    auto snap = [&](double t) { return t0 + std::round((t - t0) / dt) * dt; };
    std::vector<DisruptionWindow> out;
    for (const auto& d : disruptions_) {
      DisruptionWindow s{snap(d.t_start), snap(d.t_end), d.scale};
      if (s.t_start < s.t_end) out.push_back(s);
    }
    return CommGraph(weights_, std::move(out));
  }

 private:
  Matrix weights_;
  std::vector<DisruptionWindow> disruptions_;
};

inline Matrix effective_weights(const CommGraph& g, double t) {
  return g.effective_weights(t);
}

/// Five-player ring 1-2-3-4-5-1 with the chord 2-5, unit weights.
inline CommGraph ring_with_chord(std::vector<DisruptionWindow> disruptions = {}) {
  return CommGraph::from_edges(
      5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}, {4, 0, 1.0}, {1, 4, 1.0}},
      std::move(disruptions));
}

}  // namespace nashseek
