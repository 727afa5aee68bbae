#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nashseek {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for runtime failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a simulation leaves the finite or bounded region.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& what)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Raised when an iterative solver runs out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(double residual, long iterations, const std::string& what)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Player i's slice of a stacked joint vector.
inline auto block(Vector& v, int i, int dim) { return v.segment(i * dim, dim); }
inline auto block(const Vector& v, int i, int dim) {
  return v.segment(i * dim, dim);
}

}  // namespace nashseek
