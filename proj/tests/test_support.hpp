#pragma once

#include <functional>
#include <random>

#include "corrlearn/dynamics.hpp"
#include "corrlearn/objective.hpp"

namespace corrlearn::testing {

/// phi = [x^2, u^2] on a scalar system; h = w x^2.
class ScalarQuadraticCost final : public FeatureCost {
 public:
  explicit ScalarQuadraticCost(double final_weight = 0.0) : w_(final_weight) {}
  std::string name() const override { return "scalar"; }
  int feature_dim() const override { return 2; }
  int state_dim() const override { return 1; }
  int input_dim() const override { return 1; }

 protected:
  Vec features_impl(const Vec& x, const Vec& u) const override {
    return (Vec(2) << x(0) * x(0), u(0) * u(0)).finished();
  }
  FeatureJacobians feature_jacobians_impl(const Vec& x, const Vec& u) const override {
    FeatureJacobians j{Mat::Zero(2, 1), Mat::Zero(2, 1)};
    j.dx(0, 0) = 2.0 * x(0);
    j.du(1, 0) = 2.0 * u(0);
    return j;
  }
  double final_cost_impl(const Vec& x) const override { return w_ * x(0) * x(0); }
  Vec final_gradient_impl(const Vec& x) const override { return Vec::Constant(1, 2.0 * w_ * x(0)); }

 private:
  double w_;
};

inline std::shared_ptr<LinearSystem> scalar_integrator() {
  return std::make_shared<LinearSystem>(Mat::Ones(1, 1), Mat::Ones(1, 1));
}

inline Vec random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

inline Vec uniform_vec(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Vec v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) v(i) = lo(i) + (hi(i) - lo(i)) * d(rng);
  return v;
}

/// Central differences of a vector function; columns index the input.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  const Vec f0 = f(x);
  Mat J(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return J;
}

inline double relative_error(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

/// Random unit quaternion [w, x, y, z].
inline Vec random_quaternion(std::mt19937_64& rng) {
  Vec q = random_vec(rng, 4);
  return q / q.norm();
}

/// Random state valid for the system (unit quaternion for the quadrotor).
inline Vec random_state(const SystemModel& sys, std::mt19937_64& rng, double scale = 1.0) {
  Vec x = random_vec(rng, sys.state_dim(), scale);
  if (sys.kind() == "quadrotor") x.segment(6, 4) = random_quaternion(rng);
  return x;
}

}  // namespace corrlearn::testing
