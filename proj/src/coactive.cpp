#include "corrlearn/coactive.hpp"

#include <spdlog/spdlog.h>

namespace corrlearn {

Mat second_difference_matrix(int size) {
  if (size < 1) throw Error("second difference matrix: size must be positive");
  Mat M = Mat::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    M(i, i) = 2.0;
    if (i > 0) M(i, i - 1) = -1.0;
    if (i + 1 < size) M(i, i + 1) = -1.0;
  }
  return M;
}

namespace {

Vec deformation(const Trajectory& traj, const std::vector<Correction>& corrections, int m) {
  const int T = traj.horizon();
  Mat A = Mat::Zero(T + 1, m);  // row t = a at time t
  for (const Correction& c : corrections) {
    const Vec a_bar = embed_correction(c, m, T);
    A += Eigen::Map<const Mat>(a_bar.data(), m, T + 1).transpose();
  }
  const Mat D = second_difference_matrix(T + 1).ldlt().solve(A);
  const Mat Dt = D.transpose();
  return Eigen::Map<const Vec>(Dt.data(), Dt.size());
}

}  // namespace

Trajectory deform_trajectory(const SystemModel& system, const Trajectory& traj, const Correction& corr) {
  const Vec u = traj.stacked_controls() + deformation(traj, {corr}, system.input_dim());
  return rollout(system, traj.states.front(), u);
}

CoactiveHistory run_coactive(const TaskPreset& task, const Vec& theta0, CorrectionSource& source,
                             const CoactiveConfig& config) {
  if (!(config.step_size > 0.0)) throw Error("coactive: step size must be positive");
  require_dim(theta0, task.cost->feature_dim(), "theta0");
  CoactiveHistory out;
  Vec theta = theta0;
  std::optional<Vec> warm;
  for (int k = 1; k <= config.iterations; ++k) {
    CoactiveRecord rec;
    rec.k = k;
    rec.theta = theta;
    if (config.theta_star) rec.error = (theta - *config.theta_star).squaredNorm();

    PlanOptions opts = config.plan;
    opts.require_convergence = false;
    opts.initial_controls = warm;
    Trajectory traj;
    try {
      const PlanResult plan = plan_detailed(*task.system, *task.cost, theta, task.x0, task.horizon, opts);
      traj = plan.trajectory;
      warm = traj.stacked_controls();
    } catch (const NonFiniteError& e) {
      out.diverged = true;
      out.message = std::string("planning diverged: ") + e.what();
      out.iterations.push_back(std::move(rec));
      break;
    }

    const auto batch = source.corrections(k, traj);
    if (batch) rec.corrections = *batch;
    out.iterations.push_back(rec);
    if (!batch || batch->empty()) continue;

    const Vec u_bar = traj.stacked_controls() + deformation(traj, *batch, task.system->input_dim());
    Trajectory intended;
    try {
      intended = rollout(*task.system, task.x0, u_bar);
    } catch (const NonFiniteError& e) {
      out.diverged = true;
      out.message = std::string("deformed rollout diverged: ") + e.what();
      break;
    }
    theta += config.step_size * (feature_totals(*task.cost, intended) - feature_totals(*task.cost, traj));
    if (!theta.allFinite()) {
      out.diverged = true;
      out.message = "theta became non-finite";
      break;
    }
  }
  out.final_theta = out.iterations.empty() ? theta0 : out.iterations.back().theta;
  if (out.diverged) spdlog::warn("coactive baseline: {}", out.message);
  return out;
}

ScriptedSource shared_schedule(const RunHistory& run) {
  std::map<int, std::vector<Correction>> script;
  for (const auto& rec : run.iterations) {
    std::vector<Correction> batch;
    for (const auto& cut : rec.cuts) batch.push_back(cut.correction);
    script[rec.k] = std::move(batch);
  }
  return ScriptedSource(std::move(script));
}

}  // namespace corrlearn
