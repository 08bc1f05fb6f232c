#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace corrlearn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix shapes do not agree with the model they are used with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity encountered in an input or produced by a computation.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// The search polytope is empty or has no interior. Raised when the
/// accumulated corrections are mutually inconsistent.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline bool all_finite(const Eigen::Ref<const Mat>& m) { return m.allFinite(); }

inline void require_dim(const Eigen::Ref<const Vec>& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
  }
}

}  // namespace corrlearn
