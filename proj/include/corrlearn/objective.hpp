#pragma once

#include <memory>
#include <string>

#include "corrlearn/dynamics.hpp"

namespace corrlearn {

/// Jacobians of the stage feature map.
struct FeatureJacobians {
  Mat dx;  // r x n
  Mat du;  // r x m
};

/// Running cost theta^T phi(x, u) summed over t = 0..T plus a final cost h(x_{T+1}).
class FeatureCost {
 public:
  virtual ~FeatureCost() = default;

  virtual std::string name() const = 0;
  virtual int feature_dim() const = 0;
  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;

  Vec features(const Vec& x, const Vec& u) const;
  FeatureJacobians feature_jacobians(const Vec& x, const Vec& u) const;
  double final_cost(const Vec& x) const;
  Vec final_gradient(const Vec& x) const;

 protected:
  virtual Vec features_impl(const Vec& x, const Vec& u) const = 0;
  virtual FeatureJacobians feature_jacobians_impl(const Vec& x, const Vec& u) const = 0;
  virtual double final_cost_impl(const Vec& x) const = 0;
  virtual Vec final_gradient_impl(const Vec& x) const = 0;

 private:
  void check_point(const Vec& x, const Vec& u) const;
};

using CostPtr = std::shared_ptr<const FeatureCost>;

/// phi = [a^2, a, adot^2, u^2]; h = w (a - a_target)^2 + w adot^2.
class PendulumCost final : public FeatureCost {
 public:
  explicit PendulumCost(double final_weight = 10.0, double target_angle = M_PI)
      : w_(final_weight), target_(target_angle) {}

  std::string name() const override { return "pendulum"; }
  int feature_dim() const override { return 4; }
  int state_dim() const override { return 2; }
  int input_dim() const override { return 1; }

 protected:
  Vec features_impl(const Vec& x, const Vec& u) const override;
  FeatureJacobians feature_jacobians_impl(const Vec& x, const Vec& u) const override;
  double final_cost_impl(const Vec& x) const override;
  Vec final_gradient_impl(const Vec& x) const override;

 private:
  double w_, target_;
};

/// phi = [q1^2, q1, q2^2, q2, |u|^2]; h = w (|q - q_target|^2 + |qdot|^2).
class ArmCost final : public FeatureCost {
 public:
  explicit ArmCost(double final_weight = 100.0,
                   Eigen::Vector2d target = Eigen::Vector2d(M_PI / 2.0, 0.0))
      : w_(final_weight), target_(target) {}

  std::string name() const override { return "arm"; }
  int feature_dim() const override { return 5; }
  int state_dim() const override { return 4; }
  int input_dim() const override { return 2; }

 protected:
  Vec features_impl(const Vec& x, const Vec& u) const override;
  FeatureJacobians feature_jacobians_impl(const Vec& x, const Vec& u) const override;
  double final_cost_impl(const Vec& x) const override;
  Vec final_gradient_impl(const Vec& x) const override;

 private:
  double w_;
  Eigen::Vector2d target_;
};

struct QuadrotorCostParams {
  Eigen::Vector3d target_position{8.0, 8.0, 0.0};
  Eigen::Vector4d target_attitude{1.0, 0.0, 0.0, 0.0};
  double position_weight = 1.0;
  double velocity_weight = 10.0;
  double attitude_weight = 100.0;
  double angular_rate_weight = 10.0;
};

/// phi = [rx^2, rx, ry^2, ry, rz^2, rz, |u|^2];
/// h = wr |r - r_target|^2 + wv |v|^2 + wq e(q, q_target) + ww |w|^2.
class QuadrotorCost final : public FeatureCost {
 public:
  explicit QuadrotorCost(QuadrotorCostParams p = {}) : p_(std::move(p)) {}

  std::string name() const override { return "quadrotor"; }
  int feature_dim() const override { return 7; }
  int state_dim() const override { return 13; }
  int input_dim() const override { return 4; }
  const QuadrotorCostParams& params() const { return p_; }

 protected:
  Vec features_impl(const Vec& x, const Vec& u) const override;
  FeatureJacobians feature_jacobians_impl(const Vec& x, const Vec& u) const override;
  double final_cost_impl(const Vec& x) const override;
  Vec final_gradient_impl(const Vec& x) const override;

 private:
  QuadrotorCostParams p_;
};

/// sum_t phi(x_t, u_t) over t = 0..T.
Vec feature_totals(const FeatureCost& cost, const Trajectory& traj);

/// sum_t theta^T phi(x_t, u_t) + h(x_{T+1}).
double total_cost(const FeatureCost& cost, const Trajectory& traj, const Vec& theta);

}  // namespace corrlearn
