#pragma once

#include <vector>

#include "corrlearn/learner.hpp"

namespace corrlearn {

/// (T+1) x (T+1) second-difference matrix tridiag(-1, 2, -1).
Mat second_difference_matrix(int size);

/// u_bar = u + M^{-1} a_bar with M the second-difference matrix applied per
/// input channel; states are re-rolled through the dynamics.
Trajectory deform_trajectory(const SystemModel& system, const Trajectory& traj, const Correction& corr);

struct CoactiveRecord {
  int k = 0;
  Vec theta;
  std::optional<double> error;  // |theta_k - theta_star|^2
  std::vector<Correction> corrections;
};

struct CoactiveHistory {
  std::vector<CoactiveRecord> iterations;
  Vec final_theta;
  bool diverged = false;
  std::string message;
};

struct CoactiveConfig {
  double step_size = 0.0006;
  int iterations = 0;  // number of update rounds
  PlanOptions plan;
  std::optional<Vec> theta_star;
};

/// Co-active baseline: per round plan xi(theta_k), deform it by each
/// correction, and move theta_k by step_size (phi(xi_bar) - phi(xi)).
/// A round with several corrections applies them all to one deformation.
CoactiveHistory run_coactive(const TaskPreset& task, const Vec& theta0, CorrectionSource& source,
                             const CoactiveConfig& config);

/// Replays the corrections recorded in a run of the proposed method.
ScriptedSource shared_schedule(const RunHistory& run);

}  // namespace corrlearn
