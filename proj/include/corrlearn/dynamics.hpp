#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "corrlearn/types.hpp"

namespace corrlearn {

/// Jacobians of the discrete step map at one point.
struct Linearization {
  Mat A;  // df/dx, n x n
  Mat B;  // df/du, n x m
};

/// Discrete-time system x_{t+1} = f(x_t, u_t).
///
/// Implementations are immutable after construction. The public entry points
/// validate shapes and finiteness; subclasses only implement the math.
class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual std::string kind() const = 0;
  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual double time_step() const = 0;

  Vec step(const Vec& x, const Vec& u) const;
  Linearization linearize(const Vec& x, const Vec& u) const;

 protected:
  virtual Vec step_impl(const Vec& x, const Vec& u) const = 0;
  virtual Linearization linearize_impl(const Vec& x, const Vec& u) const = 0;

 private:
  void check_point(const Vec& x, const Vec& u) const;
};

using SystemPtr = std::shared_ptr<const SystemModel>;

/// x_{t+1} = A x_t + B u_t.
class LinearSystem final : public SystemModel {
 public:
  LinearSystem(Mat A, Mat B, double dt = 1.0);

  std::string kind() const override { return "linear"; }
  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int input_dim() const override { return static_cast<int>(B_.cols()); }
  double time_step() const override { return dt_; }

 protected:
  Vec step_impl(const Vec& x, const Vec& u) const override;
  Linearization linearize_impl(const Vec& x, const Vec& u) const override;

 private:
  Mat A_, B_;
  double dt_;
};

/// Continuous dynamics xdot = g(x, u) discretized by one explicit Euler step.
class EulerSystem : public SystemModel {
 public:
  /// xdot and its Jacobians before discretization.
  virtual Vec derivative(const Vec& x, const Vec& u) const = 0;
  virtual Linearization continuous_jacobians(const Vec& x, const Vec& u) const = 0;

 protected:
  Vec step_impl(const Vec& x, const Vec& u) const override;
  Linearization linearize_impl(const Vec& x, const Vec& u) const override;
};

struct PendulumParams {
  double gravity = 10.0;  // m/s^2
  double length = 1.0;    // m
  double mass = 1.0;      // kg
  double damping = 0.1;
  double dt = 0.2;        // s
};

/// State [alpha, alpha_dot], input [torque]. alpha is measured from the
/// downward vertical.
class Pendulum final : public EulerSystem {
 public:
  explicit Pendulum(PendulumParams p = {});

  std::string kind() const override { return "pendulum"; }
  int state_dim() const override { return 2; }
  int input_dim() const override { return 1; }
  double time_step() const override { return p_.dt; }
  const PendulumParams& params() const { return p_; }

  Vec derivative(const Vec& x, const Vec& u) const override;
  Linearization continuous_jacobians(const Vec& x, const Vec& u) const override;

 private:
  PendulumParams p_;
};

/// Planar two-link arm moving in the horizontal plane (no gravity).
/// Link centres of mass sit at half the link length; inertias are about the
/// centre of mass.
struct ArmParams {
  double mass1 = 1.0, mass2 = 1.0;        // kg
  double length1 = 1.0, length2 = 1.0;    // m
  double inertia1 = 1.0, inertia2 = 1.0;  // kg m^2
  double dt = 0.2;                        // s
};

/// State [q1, q2, q1_dot, q2_dot], input [tau1, tau2].
class TwoLinkArm final : public EulerSystem {
 public:
  explicit TwoLinkArm(ArmParams p = {});

  std::string kind() const override { return "arm"; }
  int state_dim() const override { return 4; }
  int input_dim() const override { return 2; }
  double time_step() const override { return p_.dt; }
  const ArmParams& params() const { return p_; }

  Mat mass_matrix(double q2) const;
  Vec derivative(const Vec& x, const Vec& u) const override;
  Linearization continuous_jacobians(const Vec& x, const Vec& u) const override;

  /// Elbow and tip positions for rendering and collision checks.
  std::pair<Eigen::Vector2d, Eigen::Vector2d> link_points(double q1, double q2) const;

 private:
  ArmParams p_;
};

struct QuadrotorParams {
  double mass = 1.0;                                   // kg
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Identity();  // kg m^2, body frame
  double gravity = 10.0;                               // m/s^2, along -z in the world frame
  double wing_length = 1.0;                            // m
  double torque_constant = 0.1;
  double dt = 0.1;                                     // s
};

/// Total body-z thrust and body torque produced by the four rotor thrusts.
struct Wrench {
  double force = 0.0;
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
};

Eigen::Matrix4d thrust_mixing_matrix(double wing_length, double torque_constant);
Wrench thrust_to_wrench(const Eigen::Vector4d& thrusts, double wing_length,
                        double torque_constant);

/// Quaternions are stored [w, x, y, z] and rotate body vectors into the world
/// frame. The matrix is the homogeneous quadratic form, so it equals the usual
/// direction cosine matrix on the unit sphere and stays differentiable off it.
Eigen::Matrix3d rotation_matrix(const Eigen::Vector4d& q);

/// 1/2 trace(I - R(q_target)^T R(q)); zero iff the attitudes coincide.
/// Throws if either quaternion is off the unit sphere by more than 1e-6.
double attitude_error(const Eigen::Vector4d& q, const Eigen::Vector4d& q_target);

/// Same value without the unit-norm check, and its gradient in q.
double attitude_error_unchecked(const Eigen::Vector4d& q, const Eigen::Vector4d& q_target);
Eigen::Vector4d attitude_error_gradient(const Eigen::Vector4d& q,
                                        const Eigen::Vector4d& q_target);

/// 6-DoF rigid body driven by four rotors.
/// State [r_I(3), v_I(3), q_B/I(4), w_B(3)], input [T1, T2, T3, T4].
/// The quaternion block is renormalized after each Euler step.
class Quadrotor final : public SystemModel {
 public:
  explicit Quadrotor(QuadrotorParams p = {});

  std::string kind() const override { return "quadrotor"; }
  int state_dim() const override { return 13; }
  int input_dim() const override { return 4; }
  double time_step() const override { return p_.dt; }
  const QuadrotorParams& params() const { return p_; }

  Vec derivative(const Vec& x, const Vec& u) const;

 protected:
  Vec step_impl(const Vec& x, const Vec& u) const override;
  Linearization linearize_impl(const Vec& x, const Vec& u) const override;

 private:
  QuadrotorParams p_;
  Eigen::Matrix3d inertia_inv_;
  Eigen::Matrix4d mixing_;
};

/// State sequence x_0..x_{T+1} paired with controls u_0..u_T.
struct Trajectory {
  std::vector<Vec> states;
  std::vector<Vec> controls;

  int horizon() const { return static_cast<int>(controls.size()) - 1; }
  const Vec& final_state() const { return states.back(); }
  /// Controls stacked [u_0; u_1; ...; u_T].
  Vec stacked_controls() const;
};

Trajectory rollout(const SystemModel& system, const Vec& x0, const std::vector<Vec>& controls);
Trajectory rollout(const SystemModel& system, const Vec& x0, const Vec& stacked_controls);

/// Largest ||x_{t+1} - f(x_t, u_t)|| along the trajectory.
double consistency_error(const SystemModel& system, const Trajectory& traj);

}  // namespace corrlearn
