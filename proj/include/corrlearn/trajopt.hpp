#pragma once

#include <optional>

#include "corrlearn/dynamics.hpp"
#include "corrlearn/objective.hpp"

namespace corrlearn {

struct PlanOptions {
  int max_iterations = 3000;
  double gradient_tolerance = 1e-6;  // on |grad_u J|_inf
  std::optional<Vec> initial_controls;  // stacked u_{0:T}; zero when absent
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int memory = 50;
  /// Throw ConvergenceError when the tolerance is not met. Otherwise the
  /// best iterate is returned with converged = false.
  bool require_convergence = true;
};

struct PlanResult {
  Trajectory trajectory;
  double cost = 0.0;
  double gradient_norm = 0.0;  // inf-norm
  int iterations = 0;
  bool converged = false;
};

/// Single-shooting L-BFGS over the stacked controls with a backtracking
/// line search. Deterministic. The cost never rises by more than
/// 1e-12 (1 + |J|) between iterations.
PlanResult plan_detailed(const SystemModel& system, const FeatureCost& cost, const Vec& theta,
                         const Vec& x0, int horizon, const PlanOptions& opts = {});

Trajectory plan(const SystemModel& system, const FeatureCost& cost, const Vec& theta,
                const Vec& x0, int horizon, const PlanOptions& opts = {});

}  // namespace corrlearn
