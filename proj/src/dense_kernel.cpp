#include "corrlearn/kernel.hpp"

namespace corrlearn {

KernelMatrices dense_kernel(const SystemModel& system, const FeatureCost& cost,
                            const Trajectory& traj) {
  const int T = traj.horizon();
  if (T < 1) throw Error("dense kernel: horizon must be at least 1");
  const int n = system.state_dim(), m = system.input_dim(), r = cost.feature_dim();

  std::vector<Linearization> lin;
  std::vector<FeatureJacobians> jac;
  for (int t = 0; t <= T; ++t) {
    lin.push_back(system.linearize(traj.states[t], traj.controls[t]));
    jac.push_back(cost.feature_jacobians(traj.states[t], traj.controls[t]));
  }

  // Unknowns x_1..x_T; block i (0-based) is x_{i+1}.
  Mat Fx = Mat::Identity(n * T, n * T);
  Mat Fu = Mat::Zero(m * T, n * T);
  Mat Phi_x(n * T, r), Phi_u(m * T, r);
  Mat V = Mat::Zero(n * T, n);
  for (int i = 0; i < T; ++i) {
    if (i + 1 < T) Fx.block(n * i, n * (i + 1), n, n) = -lin[i + 1].A.transpose();
    Fu.block(m * i, n * i, m, n) = lin[i].B.transpose();
    Phi_x.middleRows(n * i, n) = jac[i + 1].dx.transpose();
    Phi_u.middleRows(m * i, m) = jac[i].du.transpose();
  }
  V.bottomRows(n) = lin[T].A.transpose();

  Eigen::PartialPivLU<Mat> lu(Fx);
  if (!(std::abs(lu.determinant()) > 0.0)) throw Error("dense kernel: F_x factorization failed");

  KernelMatrices out;
  out.H1.resize(m * (T + 1), r);
  out.H1.topRows(m * T) = Fu * lu.solve(Phi_x) + Phi_u;
  out.H1.bottomRows(m) = jac[T].du.transpose();
  out.H2.resize(m * (T + 1), n);
  out.H2.topRows(m * T) = Fu * lu.solve(V);
  out.H2.bottomRows(m) = lin[T].B.transpose();
  return out;
}

}  // namespace corrlearn
