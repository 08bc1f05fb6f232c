#include "corrlearn/objective.hpp"

namespace corrlearn {

void FeatureCost::check_point(const Vec& x, const Vec& u) const {
  require_dim(x, state_dim(), "state");
  require_dim(u, input_dim(), "input");
  if (!x.allFinite() || !u.allFinite()) throw NonFiniteError(name() + " cost: non-finite state or input");
}

Vec FeatureCost::features(const Vec& x, const Vec& u) const {
  check_point(x, u);
  return features_impl(x, u);
}

FeatureJacobians FeatureCost::feature_jacobians(const Vec& x, const Vec& u) const {
  check_point(x, u);
  return feature_jacobians_impl(x, u);
}

double FeatureCost::final_cost(const Vec& x) const {
  require_dim(x, state_dim(), "final state");
  return final_cost_impl(x);
}

Vec FeatureCost::final_gradient(const Vec& x) const {
  require_dim(x, state_dim(), "final state");
  return final_gradient_impl(x);
}

// ---------------------------------------------------------------------------

Vec PendulumCost::features_impl(const Vec& x, const Vec& u) const {
  Vec phi(4);
  phi << x(0) * x(0), x(0), x(1) * x(1), u(0) * u(0);
  return phi;
}

FeatureJacobians PendulumCost::feature_jacobians_impl(const Vec& x, const Vec& u) const {
  FeatureJacobians J{Mat::Zero(4, 2), Mat::Zero(4, 1)};
  J.dx(0, 0) = 2.0 * x(0);
  J.dx(1, 0) = 1.0;
  J.dx(2, 1) = 2.0 * x(1);
  J.du(3, 0) = 2.0 * u(0);
  return J;
}

double PendulumCost::final_cost_impl(const Vec& x) const {
  const double e = x(0) - target_;
  return w_ * (e * e + x(1) * x(1));
}

Vec PendulumCost::final_gradient_impl(const Vec& x) const {
  Vec g(2);
  g << 2.0 * w_ * (x(0) - target_), 2.0 * w_ * x(1);
  return g;
}

// ---------------------------------------------------------------------------

Vec ArmCost::features_impl(const Vec& x, const Vec& u) const {
  Vec phi(5);
  phi << x(0) * x(0), x(0), x(1) * x(1), x(1), u.squaredNorm();
  return phi;
}

FeatureJacobians ArmCost::feature_jacobians_impl(const Vec& x, const Vec& u) const {
  FeatureJacobians J{Mat::Zero(5, 4), Mat::Zero(5, 2)};
  J.dx(0, 0) = 2.0 * x(0);
  J.dx(1, 0) = 1.0;
  J.dx(2, 1) = 2.0 * x(1);
  J.dx(3, 1) = 1.0;
  J.du.row(4) = 2.0 * u.transpose();
  return J;
}

double ArmCost::final_cost_impl(const Vec& x) const {
  return w_ * ((x.head<2>() - target_).squaredNorm() + x.tail<2>().squaredNorm());
}

Vec ArmCost::final_gradient_impl(const Vec& x) const {
  Vec g(4);
  g << 2.0 * w_ * (x.head<2>() - target_), 2.0 * w_ * x.tail<2>();
  return g;
}

// ---------------------------------------------------------------------------

Vec QuadrotorCost::features_impl(const Vec& x, const Vec& u) const {
  Vec phi(7);
  phi << x(0) * x(0), x(0), x(1) * x(1), x(1), x(2) * x(2), x(2), u.squaredNorm();
  return phi;
}

FeatureJacobians QuadrotorCost::feature_jacobians_impl(const Vec& x, const Vec& u) const {
  FeatureJacobians J{Mat::Zero(7, 13), Mat::Zero(7, 4)};
  for (int i = 0; i < 3; ++i) {
    J.dx(2 * i, i) = 2.0 * x(i);
    J.dx(2 * i + 1, i) = 1.0;
  }
  J.du.row(6) = 2.0 * u.transpose();
  return J;
}

double QuadrotorCost::final_cost_impl(const Vec& x) const {
  return p_.position_weight * (x.segment<3>(0) - p_.target_position).squaredNorm() +
         p_.velocity_weight * x.segment<3>(3).squaredNorm() +
         p_.attitude_weight * attitude_error_unchecked(x.segment<4>(6), p_.target_attitude) +
         p_.angular_rate_weight * x.segment<3>(10).squaredNorm();
}

Vec QuadrotorCost::final_gradient_impl(const Vec& x) const {
  Vec g(13);
  g.segment<3>(0) = 2.0 * p_.position_weight * (x.segment<3>(0) - p_.target_position);
  g.segment<3>(3) = 2.0 * p_.velocity_weight * x.segment<3>(3);
  g.segment<4>(6) =
      p_.attitude_weight * attitude_error_gradient(x.segment<4>(6), p_.target_attitude);
  g.segment<3>(10) = 2.0 * p_.angular_rate_weight * x.segment<3>(10);
  return g;
}

// ---------------------------------------------------------------------------

Vec feature_totals(const FeatureCost& cost, const Trajectory& traj) {
  Vec sum = Vec::Zero(cost.feature_dim());
  for (size_t t = 0; t < traj.controls.size(); ++t) sum += cost.features(traj.states[t], traj.controls[t]);
  return sum;
}

double total_cost(const FeatureCost& cost, const Trajectory& traj, const Vec& theta) {
  require_dim(theta, cost.feature_dim(), "theta");
  return theta.dot(feature_totals(cost, traj)) + cost.final_cost(traj.final_state());
}

}  // namespace corrlearn
