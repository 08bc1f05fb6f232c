#include "corrlearn/dynamics.hpp"

#include <array>
#include <cmath>

namespace corrlearn {

void SystemModel::check_point(const Vec& x, const Vec& u) const {
  require_dim(x, state_dim(), "state");
  require_dim(u, input_dim(), "input");
  if (!x.allFinite() || !u.allFinite()) {
    throw NonFiniteError(kind() + ": non-finite state or input");
  }
}

Vec SystemModel::step(const Vec& x, const Vec& u) const {
  check_point(x, u);
  return step_impl(x, u);
}

Linearization SystemModel::linearize(const Vec& x, const Vec& u) const {
  check_point(x, u);
  Linearization lin = linearize_impl(x, u);
  if (!lin.A.allFinite() || !lin.B.allFinite()) {
    throw NonFiniteError(kind() + ": non-finite Jacobian");
  }
  return lin;
}

// ---------------------------------------------------------------------------

LinearSystem::LinearSystem(Mat A, Mat B, double dt) : A_(std::move(A)), B_(std::move(B)), dt_(dt) {
  if (A_.rows() != A_.cols() || B_.rows() != A_.rows()) {
    throw DimensionError("LinearSystem: A must be n x n and B n x m");
  }
}

Vec LinearSystem::step_impl(const Vec& x, const Vec& u) const { return A_ * x + B_ * u; }

Linearization LinearSystem::linearize_impl(const Vec&, const Vec&) const { return {A_, B_}; }

// ---------------------------------------------------------------------------

Vec EulerSystem::step_impl(const Vec& x, const Vec& u) const {
  return x + time_step() * derivative(x, u);
}

Linearization EulerSystem::linearize_impl(const Vec& x, const Vec& u) const {
  Linearization c = continuous_jacobians(x, u);
  const double dt = time_step();
  c.A = Mat::Identity(state_dim(), state_dim()) + dt * c.A;
  c.B *= dt;
  return c;
}

// ---------------------------------------------------------------------------

Pendulum::Pendulum(PendulumParams p) : p_(p) {
  if (p_.length <= 0 || p_.mass <= 0 || p_.dt <= 0) {
    throw Error("Pendulum: length, mass and dt must be positive");
  }
}

Vec Pendulum::derivative(const Vec& x, const Vec& u) const {
  const double ml2 = p_.mass * p_.length * p_.length;
  Vec xdot(2);
  xdot << x(1), -p_.gravity / p_.length * std::sin(x(0)) - p_.damping / ml2 * x(1) + u(0) / ml2;
  return xdot;
}

Linearization Pendulum::continuous_jacobians(const Vec& x, const Vec&) const {
  const double ml2 = p_.mass * p_.length * p_.length;
  Mat A(2, 2);
  A << 0.0, 1.0, -p_.gravity / p_.length * std::cos(x(0)), -p_.damping / ml2;
  Mat B(2, 1);
  B << 0.0, 1.0 / ml2;
  return {A, B};
}

// ---------------------------------------------------------------------------

TwoLinkArm::TwoLinkArm(ArmParams p) : p_(p) {
  if (p_.mass1 <= 0 || p_.mass2 <= 0 || p_.length1 <= 0 || p_.length2 <= 0 || p_.dt <= 0) {
    throw Error("TwoLinkArm: masses, lengths and dt must be positive");
  }
}

Mat TwoLinkArm::mass_matrix(double q2) const {
  const double r1 = 0.5 * p_.length1, r2 = 0.5 * p_.length2;
  const double a = p_.mass2 * p_.length1 * r2;
  Mat M(2, 2);
  M(0, 0) = p_.inertia1 + p_.inertia2 + p_.mass1 * r1 * r1 +
            p_.mass2 * (p_.length1 * p_.length1 + r2 * r2) + 2.0 * a * std::cos(q2);
  M(0, 1) = p_.inertia2 + p_.mass2 * r2 * r2 + a * std::cos(q2);
  M(1, 0) = M(0, 1);
  M(1, 1) = p_.inertia2 + p_.mass2 * r2 * r2;
  return M;
}

Vec TwoLinkArm::derivative(const Vec& x, const Vec& u) const {
  const double a = p_.mass2 * p_.length1 * 0.5 * p_.length2;
  const double h = -a * std::sin(x(1));
  const double dq1 = x(2), dq2 = x(3);
  Eigen::Vector2d coriolis(h * (2.0 * dq1 * dq2 + dq2 * dq2), -h * dq1 * dq1);
  Eigen::Vector2d qdd = mass_matrix(x(1)).ldlt().solve(Eigen::Vector2d(u(0), u(1)) - coriolis);
  Vec xdot(4);
  xdot << dq1, dq2, qdd(0), qdd(1);
  return xdot;
}

Linearization TwoLinkArm::continuous_jacobians(const Vec& x, const Vec& u) const {
  const double a = p_.mass2 * p_.length1 * 0.5 * p_.length2;
  const double s = std::sin(x(1)), c = std::cos(x(1));
  const double h = -a * s, dh = -a * c;
  const double dq1 = x(2), dq2 = x(3);

  const Mat M = mass_matrix(x(1));
  const Eigen::LDLT<Mat> Mf(M);
  Eigen::Vector2d coriolis(h * (2.0 * dq1 * dq2 + dq2 * dq2), -h * dq1 * dq1);
  const Eigen::Vector2d qdd = Mf.solve(Eigen::Vector2d(u(0), u(1)) - coriolis);

  Mat dM(2, 2);
  dM << -2.0 * a * s, -a * s, -a * s, 0.0;
  Eigen::Vector2d dcoriolis_dq2(dh * (2.0 * dq1 * dq2 + dq2 * dq2), -dh * dq1 * dq1);
  Mat dcoriolis_ddq(2, 2);
  dcoriolis_ddq << 2.0 * h * dq2, 2.0 * h * (dq1 + dq2), -2.0 * h * dq1, 0.0;

  Mat A = Mat::Zero(4, 4);
  A(0, 2) = 1.0;
  A(1, 3) = 1.0;
  A.block(2, 1, 2, 1) = Mf.solve(-dcoriolis_dq2 - dM * qdd);
  A.block(2, 2, 2, 2) = Mf.solve(-dcoriolis_ddq);
  Mat B = Mat::Zero(4, 2);
  B.block(2, 0, 2, 2) = Mf.solve(Mat::Identity(2, 2));
  return {A, B};
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> TwoLinkArm::link_points(double q1, double q2) const {
  Eigen::Vector2d elbow(p_.length1 * std::cos(q1), p_.length1 * std::sin(q1));
  Eigen::Vector2d tip = elbow + Eigen::Vector2d(p_.length2 * std::cos(q1 + q2),
                                                p_.length2 * std::sin(q1 + q2));
  return {elbow, tip};
}

// ---------------------------------------------------------------------------

Eigen::Matrix4d thrust_mixing_matrix(double lw, double c) {
  Eigen::Matrix4d K;
  K << 1.0, 1.0, 1.0, 1.0,
       0.0, -lw / 2.0, 0.0, lw / 2.0,
       -lw / 2.0, 0.0, lw / 2.0, 0.0,
       c, -c, c, -c;
  return K;
}

Wrench thrust_to_wrench(const Eigen::Vector4d& thrusts, double wing_length, double torque_constant) {
  const Eigen::Vector4d w = thrust_mixing_matrix(wing_length, torque_constant) * thrusts;
  return {w(0), w.tail<3>()};
}

Eigen::Matrix3d rotation_matrix(const Eigen::Vector4d& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix3d R;
  R << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
  return R;
}

namespace {

// dR/dq_k for the homogeneous quadratic form above.
std::array<Eigen::Matrix3d, 4> rotation_matrix_partials(const Eigen::Vector4d& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  std::array<Eigen::Matrix3d, 4> d;
  d[0] << w, -z, y,
          z, w, -x,
          -y, x, w;
  d[1] << x, y, z,
          y, -x, -w,
          z, w, -x;
  d[2] << -y, x, w,
          x, y, z,
          -w, z, -y;
  d[3] << -z, -w, x,
          w, -z, y,
          x, y, z;
  for (auto& m : d) m *= 2.0;
  return d;
}

// Omega(w) q written as a linear map of w: Xi(q) w.
Eigen::Matrix<double, 4, 3> quaternion_rate_in_omega(const Eigen::Vector4d& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix<double, 4, 3> Xi;
  Xi << -x, -y, -z,
        w, -z, y,
        z, w, -x,
        -y, x, w;
  return Xi;
}

Eigen::Matrix4d quaternion_rate_matrix(const Eigen::Vector3d& om) {
  Eigen::Matrix4d O;
  O << 0.0, -om(0), -om(1), -om(2),
       om(0), 0.0, om(2), -om(1),
       om(1), -om(2), 0.0, om(0),
       om(2), om(1), -om(0), 0.0;
  return O;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d S;
  S << 0.0, -v(2), v(1), v(2), 0.0, -v(0), -v(1), v(0), 0.0;
  return S;
}

}  // namespace

double attitude_error_unchecked(const Eigen::Vector4d& q, const Eigen::Vector4d& q_target) {
  const Eigen::Matrix3d Rt = rotation_matrix(q_target);
  return 0.5 * (3.0 - (Rt.transpose() * rotation_matrix(q)).trace());
}

double attitude_error(const Eigen::Vector4d& q, const Eigen::Vector4d& q_target) {
  if (std::abs(q.norm() - 1.0) > 1e-6 || std::abs(q_target.norm() - 1.0) > 1e-6) {
    throw Error("attitude_error: quaternions must have unit norm");
  }
  return attitude_error_unchecked(q, q_target);
}

Eigen::Vector4d attitude_error_gradient(const Eigen::Vector4d& q, const Eigen::Vector4d& q_target) {
  const Eigen::Matrix3d Rt = rotation_matrix(q_target);
  const auto dR = rotation_matrix_partials(q);
  Eigen::Vector4d g;
  // trace(Rt^T dR) is the Frobenius inner product of Rt and dR.
  for (int k = 0; k < 4; ++k) g(k) = -0.5 * Rt.cwiseProduct(dR[k]).sum();
  return g;
}

Quadrotor::Quadrotor(QuadrotorParams p) : p_(std::move(p)) {
  if (p_.mass <= 0 || p_.dt <= 0) throw Error("Quadrotor: mass and dt must be positive");
  Eigen::LLT<Eigen::Matrix3d> llt(p_.inertia);
  if (llt.info() != Eigen::Success) throw Error("Quadrotor: inertia must be positive definite");
  inertia_inv_ = p_.inertia.inverse();
  mixing_ = thrust_mixing_matrix(p_.wing_length, p_.torque_constant);
}

Vec Quadrotor::derivative(const Vec& x, const Vec& u) const {
  const Eigen::Vector3d v = x.segment<3>(3);
  const Eigen::Vector4d q = x.segment<4>(6);
  const Eigen::Vector3d om = x.segment<3>(10);
  const Eigen::Vector4d wrench = mixing_ * u.head<4>();

  Vec xdot(13);
  xdot.segment<3>(0) = v;
  xdot.segment<3>(3) = Eigen::Vector3d(0, 0, -p_.gravity) +
                       rotation_matrix(q).col(2) * wrench(0) / p_.mass;
  xdot.segment<4>(6) = 0.5 * quaternion_rate_matrix(om) * q;
  xdot.segment<3>(10) =
      inertia_inv_ * (wrench.tail<3>() - om.cross(p_.inertia * om));
  return xdot;
}

Vec Quadrotor::step_impl(const Vec& x, const Vec& u) const {
  Vec next = x + p_.dt * derivative(x, u);
  const double nq = next.segment<4>(6).norm();
  if (!(nq > 0.0)) throw NonFiniteError("quadrotor: degenerate quaternion");
  next.segment<4>(6) /= nq;
  return next;
}

Linearization Quadrotor::linearize_impl(const Vec& x, const Vec& u) const {
  const double dt = p_.dt;
  const Eigen::Vector4d q = x.segment<4>(6);
  const Eigen::Vector3d om = x.segment<3>(10);
  const Eigen::Vector4d wrench = mixing_ * u.head<4>();

  // Continuous-time Jacobians.
  Mat Ac = Mat::Zero(13, 13);
  Mat Bc = Mat::Zero(13, 4);
  Ac.block<3, 3>(0, 3).setIdentity();
  const auto dR = rotation_matrix_partials(q);
  for (int k = 0; k < 4; ++k) Ac.block<3, 1>(3, 6 + k) = dR[k].col(2) * wrench(0) / p_.mass;
  Bc.block<3, 4>(3, 0) = rotation_matrix(q).col(2) * mixing_.row(0) / p_.mass;
  Ac.block<4, 4>(6, 6) = 0.5 * quaternion_rate_matrix(om);
  Ac.block<4, 3>(6, 10) = 0.5 * quaternion_rate_in_omega(q);
  const Eigen::Vector3d Jw = p_.inertia * om;
  Ac.block<3, 3>(10, 10) = -inertia_inv_ * (skew(om) * p_.inertia - skew(Jw));
  Bc.block<3, 4>(10, 0) = inertia_inv_ * mixing_.bottomRows<3>();

  Mat A = Mat::Identity(13, 13) + dt * Ac;
  Mat B = dt * Bc;

  // Chain rule through the quaternion renormalization.
  const Eigen::Vector4d q_raw = q + dt * 0.5 * quaternion_rate_matrix(om) * q;
  const double nq = q_raw.norm();
  const Eigen::Vector4d qh = q_raw / nq;
  const Eigen::Matrix4d N = (Eigen::Matrix4d::Identity() - qh * qh.transpose()) / nq;
  A.middleRows<4>(6) = N * A.middleRows<4>(6);
  B.middleRows<4>(6) = N * B.middleRows<4>(6);
  return {A, B};
}

// ---------------------------------------------------------------------------

Vec Trajectory::stacked_controls() const {
  if (controls.empty()) return {};
  const auto m = controls.front().size();
  Vec out(m * static_cast<Eigen::Index>(controls.size()));
  for (size_t t = 0; t < controls.size(); ++t) out.segment(m * t, m) = controls[t];
  return out;
}

Trajectory rollout(const SystemModel& system, const Vec& x0, const std::vector<Vec>& controls) {
  if (controls.empty()) throw DimensionError("rollout: at least one control is required");
  Trajectory traj;
  traj.controls = controls;
  traj.states.reserve(controls.size() + 1);
  traj.states.push_back(x0);
  for (size_t t = 0; t < controls.size(); ++t) {
    Vec next = system.step(traj.states.back(), controls[t]);
    if (!next.allFinite()) {
      throw NonFiniteError("rollout diverged at step " + std::to_string(t));
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Trajectory rollout(const SystemModel& system, const Vec& x0, const Vec& stacked_controls) {
  const int m = system.input_dim();
  if (stacked_controls.size() == 0 || stacked_controls.size() % m != 0) {
    throw DimensionError("rollout: stacked controls length must be a positive multiple of m");
  }
  std::vector<Vec> controls(stacked_controls.size() / m);
  for (size_t t = 0; t < controls.size(); ++t) controls[t] = stacked_controls.segment(m * t, m);
  return rollout(system, x0, controls);
}

double consistency_error(const SystemModel& system, const Trajectory& traj) {
  double worst = 0.0;
  for (size_t t = 0; t < traj.controls.size(); ++t) {
    worst = std::max(worst, (traj.states[t + 1] - system.step(traj.states[t], traj.controls[t])).norm());
  }
  return worst;
}

}  // namespace corrlearn
