#include "corrlearn/learner.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

namespace corrlearn {

CenterStrategy parse_center_strategy(const std::string& name) {
  if (name == "mve") return CenterStrategy::mve;
  if (name == "analytic") return CenterStrategy::analytic;
  if (name == "chebyshev") return CenterStrategy::chebyshev;
  throw Error("unknown center strategy '" + name + "' (expected mve, analytic or chebyshev)");
}

std::string to_string(CenterStrategy s) {
  switch (s) {
    case CenterStrategy::mve: return "mve";
    case CenterStrategy::analytic: return "analytic";
    case CenterStrategy::chebyshev: return "chebyshev";
  }
  return "unknown";
}

Vec compute_center(const SearchSpace& space, CenterStrategy strategy) {
  switch (strategy) {
    case CenterStrategy::mve: return mve_center(space).center;
    case CenterStrategy::analytic: return analytic_center(space);
    case CenterStrategy::chebyshev: {
      const Ball b = chebyshev_center(space);
      if (!(b.radius > 0.0)) throw InfeasibleError("search space has no interior");
      return b.center;
    }
  }
  throw Error("unknown center strategy");
}

int max_iterations(int r, double R, double eps) {
  if (r < 2) throw Error("max_iterations: dimension must be at least 2");
  if (!(eps > 0.0)) throw Error("max_iterations: epsilon must be positive");
  if (eps > R) throw Error("max_iterations: epsilon must not exceed R");
  const double K = r * std::log(R / eps) / -std::log(1.0 - 1.0 / r);
  return static_cast<int>(std::ceil(K));
}

std::optional<Correction> oracle_correction(const SystemModel& system, const FeatureCost& cost,
                                            const Trajectory& traj, const Vec& theta_star,
                                            std::mt19937_64& rng, double tolerance) {
  if (!theta_star.allFinite()) throw NonFiniteError("oracle: theta_star is not finite");
  const Vec grad = cost_gradient(system, cost, traj, theta_star);
  if (grad.lpNorm<Eigen::Infinity>() <= tolerance) return std::nullopt;
  const int m = system.input_dim(), T = traj.horizon();
  std::uniform_int_distribution<int> pick(0, T);
  for (int attempt = 0; attempt <= T; ++attempt) {
    const int t = pick(rng);
    const Vec block = grad.segment(static_cast<Eigen::Index>(m) * t, m);
    Vec a = -block.unaryExpr([](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); });
    if (!a.isZero(0.0)) return Correction{a, t};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

OracleSource::OracleSource(SystemPtr system, CostPtr cost, Vec theta_star, std::uint64_t seed,
                           double tolerance)
    : system_(std::move(system)),
      cost_(std::move(cost)),
      theta_star_(std::move(theta_star)),
      rng_(seed),
      tolerance_(tolerance) {
  require_dim(theta_star_, cost_->feature_dim(), "theta_star");
}

std::optional<std::vector<Correction>> OracleSource::corrections(int, const Trajectory& traj) {
  auto c = oracle_correction(*system_, *cost_, traj, theta_star_, rng_, tolerance_);
  if (!c) return std::nullopt;
  return std::vector<Correction>{*c};
}

ScriptedSource::ScriptedSource(std::map<int, std::vector<Correction>> script)
    : script_(std::move(script)) {}

std::optional<std::vector<Correction>> ScriptedSource::corrections(int k, const Trajectory&) {
  if (script_.empty() || k > script_.rbegin()->first) return std::nullopt;
  const auto it = script_.find(k);
  if (it == script_.end()) return std::vector<Correction>{};
  return it->second;
}

void ChannelSource::push(std::vector<Correction> batch) {
  {
    std::lock_guard lock(mutex_);
    queue_.emplace_back(std::move(batch));
  }
  ready_.notify_one();
}

void ChannelSource::finish() {
  {
    std::lock_guard lock(mutex_);
    queue_.emplace_back(std::nullopt);
  }
  ready_.notify_one();
}

std::optional<std::vector<Correction>> ChannelSource::corrections(int, const Trajectory&) {
  std::unique_lock lock(mutex_);
  ready_.wait(lock, [this] { return !queue_.empty(); });
  auto batch = std::move(queue_.front());
  queue_.pop_front();
  return batch;
}

// ---------------------------------------------------------------------------

namespace {

std::string describe(const Correction& c) {
  std::ostringstream os;
  os << "t_k=" << c.time << ", a=[";
  for (Eigen::Index i = 0; i < c.direction.size(); ++i) os << (i ? "," : "") << c.direction(i);
  os << "]";
  return os.str();
}

}  // namespace

Learner::Learner(TaskPreset task, LearnerConfig config)
    : task_(std::move(task)), config_(std::move(config)), space_(task_.initial_space()) {
  const int r = task_.cost->feature_dim();
  if (config_.theta_star) require_dim(*config_.theta_star, r, "theta_star");
  bound_ = config_.iteration_limit > 0
               ? config_.iteration_limit
               : max_iterations(r, task_.initial_box.radius(), config_.epsilon);
}

const IterationRecord& Learner::plan_iteration() {
  const auto start = std::chrono::steady_clock::now();
  IterationRecord rec;
  rec.k = k() + 1;
  rec.space_before = space_;
  rec.theta = compute_center(space_, config_.center);

  PlanOptions opts = config_.plan;
  const bool warm = config_.warm_start && !records_.empty();
  if (warm) opts.initial_controls = records_.back().trajectory.stacked_controls();
  PlanResult plan;
  try {
    plan = plan_detailed(*task_.system, *task_.cost, rec.theta, task_.x0, task_.horizon, opts);
  } catch (const Error& e) {
    if (!warm) throw;
    spdlog::debug("k={}: warm-started plan failed ({}), retrying from zero controls", rec.k, e.what());
    opts.initial_controls.reset();
    plan = plan_detailed(*task_.system, *task_.cost, rec.theta, task_.x0, task_.horizon, opts);
  }
  rec.trajectory = std::move(plan.trajectory);
  rec.plan_gradient_norm = plan.gradient_norm;
  if (config_.theta_star) rec.error = (rec.theta - *config_.theta_star).squaredNorm();
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  records_.push_back(std::move(rec));
  if (spdlog::should_log(spdlog::level::debug)) {
    std::ostringstream os;
    os << records_.back().theta.transpose();
    spdlog::debug("k={} theta=[{}] plan |grad|={:.2e}", records_.back().k, os.str(),
                  records_.back().plan_gradient_norm);
  }
  return records_.back();
}

const IterationRecord& Learner::repeat_iteration() {
  if (records_.empty()) return plan_iteration();
  if (!records_.back().cuts.empty()) throw Error("repeat_iteration: the search space has changed");
  IterationRecord rec = records_.back();
  rec.k += 1;
  rec.volume.reset();
  rec.wall_ms = 0.0;
  records_.push_back(std::move(rec));
  return records_.back();
}

const IterationRecord& Learner::apply_corrections(const std::vector<Correction>& corrections) {
  if (records_.empty()) throw Error("apply_corrections: no planned trajectory yet");
  const auto start = std::chrono::steady_clock::now();
  IterationRecord& rec = records_.back();
  const int r = task_.cost->feature_dim();
  const double scale = task_.initial_box.radius() + 1.0;
  for (const Correction& corr : corrections) {
    CutRecord cut;
    cut.correction = corr;
    cut.halfspace = correction_halfspace(*task_.system, *task_.cost, rec.trajectory, corr);
    cut.residual = cut.halfspace.value(rec.theta);
    if (config_.theta_star) cut.star_value = cut.halfspace.value(*config_.theta_star);

    SearchSpace next = space_.add_cut(cut.halfspace);
    double radius = 0.0;
    try {
      radius = chebyshev_center(next).radius;
    } catch (const InfeasibleError&) {
      radius = 0.0;
    }
    if (!(radius > 1e-10 * scale)) {
      throw InfeasibleError("correction " + std::to_string(rec.cuts.size() + 1) + " of iteration " +
                            std::to_string(rec.k) + " (" + describe(corr) +
                            ") leaves no weights consistent with all corrections so far; "
                            "the corrections contradict each other");
    }
    if (next.row_count() > config_.prune_factor * static_cast<size_t>(r)) next = prune_redundant(next);
    space_ = std::move(next);
    rec.cuts.push_back(std::move(cut));
  }
  if (config_.volume_samples > 0) {
    rec.volume = estimate_volume(space_, config_.volume_samples, config_.seed + rec.k, bounding_box(space_));
  }
  rec.wall_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

RunHistory make_history(const Learner& learner, std::string stop_reason, std::string message) {
  RunHistory out;
  out.task = learner.task().name;
  out.stop_reason = std::move(stop_reason);
  out.message = std::move(message);
  out.iteration_bound = learner.iteration_bound();
  out.iterations = learner.records();
  out.final_theta = out.iterations.empty() ? Vec() : out.iterations.back().theta;
  out.final_space = learner.space();
  out.theta_star = learner.config().theta_star;
  return out;
}

RunHistory run_learning(const TaskPreset& task, CorrectionSource& source, const LearnerConfig& config) {
  Learner learner(task, config);
  std::string stop_reason = "iteration_limit", message;
  for (int k = 1; k <= learner.iteration_bound(); ++k) {
    const bool unchanged = !learner.records().empty() && learner.records().back().cuts.empty();
    const IterationRecord& rec = unchanged ? learner.repeat_iteration() : learner.plan_iteration();
    const auto batch = source.corrections(k, rec.trajectory);
    if (!batch) {
      stop_reason = "satisfied";
      break;
    }
    try {
      learner.apply_corrections(*batch);
    } catch (const InfeasibleError& e) {
      stop_reason = "infeasible";
      message = e.what();
      spdlog::error("learning halted: {}", e.what());
      break;
    }
  }
  return make_history(learner, stop_reason, message);
}

}  // namespace corrlearn
