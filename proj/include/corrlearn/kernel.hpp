#pragma once

#include "corrlearn/dynamics.hpp"
#include "corrlearn/halfspace.hpp"
#include "corrlearn/objective.hpp"

namespace corrlearn {

/// Input-space direction applied at one time step of the horizon.
struct Correction {
  Vec direction;  // m entries; only the direction matters
  int time = 0;   // t_k in [0, T]
};

/// Gradient coefficient matrices: grad_u J = H1 theta + H2 grad h(x_{T+1}).
struct KernelMatrices {
  Mat H1;  // m(T+1) x r
  Mat H2;  // m(T+1) x n
};

/// Forward recursion over the horizon. Cost O(T^2 m n) without inverting
/// the stacked dynamics matrix.
KernelMatrices recursive_kernel(const SystemModel& system, const FeatureCost& cost,
                                const Trajectory& traj);

/// Explicit construction through the block-bidiagonal system F_x. Reference
/// implementation for tests; quadratic memory in T.
KernelMatrices dense_kernel(const SystemModel& system, const FeatureCost& cost,
                            const Trajectory& traj);

/// Gradient of J(u_{0:T}, theta) with respect to the stacked controls.
Vec cost_gradient(const SystemModel& system, const FeatureCost& cost, const Trajectory& traj,
                  const Vec& theta);

/// Sparse embedding a_bar of a correction into the m(T+1) control stack.
Vec embed_correction(const Correction& corr, int input_dim, int horizon);

/// Raw cut <h, theta> + b <= 0 implied by a correction on `traj`.
/// Only the m rows of H1 and H2 at block t_k are formed.
Halfspace correction_halfspace(const SystemModel& system, const FeatureCost& cost,
                               const Trajectory& traj, const Correction& corr);

}  // namespace corrlearn
