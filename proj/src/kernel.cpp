#include "corrlearn/kernel.hpp"

#include <string>

namespace corrlearn {

namespace {

void check_inputs(const SystemModel& system, const FeatureCost& cost, const Trajectory& traj) {
  if (traj.horizon() < 1) throw Error("kernel: horizon must be at least 1");
  if (traj.states.size() != traj.controls.size() + 1) {
    throw DimensionError("kernel: trajectory needs one more state than controls");
  }
  if (cost.state_dim() != system.state_dim() || cost.input_dim() != system.input_dim()) {
    throw DimensionError("kernel: cost and system dimensions differ");
  }
}

// Shared forward pass. With block >= 0 only that block of H1/H2 is kept.
KernelMatrices forward_recursion(const SystemModel& system, const FeatureCost& cost,
                                 const Trajectory& traj, int block) {
  check_inputs(system, cost, traj);
  const int n = system.state_dim(), m = system.input_dim(), r = cost.feature_dim();
  const int T = traj.horizon();

  // G holds d x_t / d u_s transposed for s < t, stacked by s. When only one
  // block is wanted, G shrinks to that block's m rows once s = block enters.
  const bool single = block >= 0;
  Mat H1, G;
  {
    const FeatureJacobians j0 = cost.feature_jacobians(traj.states[0], traj.controls[0]);
    const Linearization lin0 = system.linearize(traj.states[0], traj.controls[0]);
    if (!single || block == 0) {
      H1 = j0.du.transpose();
      G = lin0.B.transpose();
    } else {
      H1.resize(0, r);
      G.resize(0, n);
    }
  }
  for (int t = 1; t <= T; ++t) {
    const Vec& x = traj.states[t];
    const Vec& u = traj.controls[t];
    const FeatureJacobians jac = cost.feature_jacobians(x, u);
    const Linearization lin = system.linearize(x, u);
    if (G.rows() > 0) {
      H1 += G * jac.dx.transpose();
      G = (G * lin.A.transpose()).eval();
    }
    if (!single || block == t) {
      Mat H1n(H1.rows() + m, r);
      H1n << H1, jac.du.transpose();
      H1 = std::move(H1n);
      Mat Gn(G.rows() + m, n);
      Gn << G, lin.B.transpose();
      G = std::move(Gn);
    }
  }
  return {H1, G};
}

}  // namespace

KernelMatrices recursive_kernel(const SystemModel& system, const FeatureCost& cost,
                                const Trajectory& traj) {
  return forward_recursion(system, cost, traj, -1);
}

Vec cost_gradient(const SystemModel& system, const FeatureCost& cost, const Trajectory& traj,
                  const Vec& theta) {
  require_dim(theta, cost.feature_dim(), "theta");
  const KernelMatrices k = recursive_kernel(system, cost, traj);
  return k.H1 * theta + k.H2 * cost.final_gradient(traj.final_state());
}

Vec embed_correction(const Correction& corr, int input_dim, int horizon) {
  require_dim(corr.direction, input_dim, "correction direction");
  if (corr.time < 0 || corr.time > horizon) {
    throw Error("correction time " + std::to_string(corr.time) + " outside [0, " +
                std::to_string(horizon) + "]");
  }
  Vec a = Vec::Zero(static_cast<Eigen::Index>(input_dim) * (horizon + 1));
  a.segment(static_cast<Eigen::Index>(input_dim) * corr.time, input_dim) = corr.direction;
  return a;
}

Halfspace correction_halfspace(const SystemModel& system, const FeatureCost& cost,
                               const Trajectory& traj, const Correction& corr) {
  const int T = traj.horizon();
  embed_correction(corr, system.input_dim(), T);  // validates shape and time
  if (!corr.direction.allFinite()) throw NonFiniteError("correction direction is not finite");
  if (corr.direction.isZero(0.0)) throw Error("correction direction must be nonzero");
  const KernelMatrices k = forward_recursion(system, cost, traj, corr.time);
  return {k.H1.transpose() * corr.direction,
          corr.direction.dot(k.H2 * cost.final_gradient(traj.final_state()))};
}

}  // namespace corrlearn
