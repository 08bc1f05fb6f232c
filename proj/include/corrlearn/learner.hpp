#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "corrlearn/kernel.hpp"
#include "corrlearn/polytope.hpp"
#include "corrlearn/tasks.hpp"
#include "corrlearn/trajopt.hpp"

namespace corrlearn {

enum class CenterStrategy { mve, analytic, chebyshev };

CenterStrategy parse_center_strategy(const std::string& name);
std::string to_string(CenterStrategy s);

/// Next weight guess inside the space.
Vec compute_center(const SearchSpace& space, CenterStrategy strategy);

/// Iteration bound K = ceil(r log(R / eps) / -log(1 - 1/r)).
/// Requires r >= 2 and 0 < eps <= R.
int max_iterations(int r, double R, double eps);

/// Simulated human: a = -sign(block t_k of grad J(theta_star)) with t_k
/// uniform on [0, T]. An all-zero block is redrawn up to T + 1 times.
/// Returns nullopt when |grad J(theta_star)|_inf <= tolerance.
std::optional<Correction> oracle_correction(const SystemModel& system, const FeatureCost& cost,
                                            const Trajectory& traj, const Vec& theta_star,
                                            std::mt19937_64& rng, double tolerance = 1e-4);

/// Supplies the corrections for one playback of the robot's trajectory.
class CorrectionSource {
 public:
  virtual ~CorrectionSource() = default;
  /// nullopt: the trajectory is satisfactory and learning stops.
  /// An empty list: no correction this round.
  virtual std::optional<std::vector<Correction>> corrections(int k, const Trajectory& traj) = 0;
};

class OracleSource final : public CorrectionSource {
 public:
  OracleSource(SystemPtr system, CostPtr cost, Vec theta_star, std::uint64_t seed,
               double tolerance = 1e-4);
  std::optional<std::vector<Correction>> corrections(int k, const Trajectory& traj) override;

 private:
  SystemPtr system_;
  CostPtr cost_;
  Vec theta_star_;
  std::mt19937_64 rng_;
  double tolerance_;
};

/// Fixed per-iteration corrections. Iterations missing from the script get
/// no correction; past the last scripted iteration the source reports the
/// trajectory satisfactory.
class ScriptedSource final : public CorrectionSource {
 public:
  explicit ScriptedSource(std::map<int, std::vector<Correction>> script);
  std::optional<std::vector<Correction>> corrections(int k, const Trajectory& traj) override;

 private:
  std::map<int, std::vector<Correction>> script_;
};

/// Corrections produced by another thread. Each push() delivers the batch for
/// one playback; finish() marks the trajectory satisfactory. corrections()
/// blocks until a batch arrives.
class ChannelSource final : public CorrectionSource {
 public:
  void push(std::vector<Correction> batch);
  void finish();
  std::optional<std::vector<Correction>> corrections(int k, const Trajectory& traj) override;

 private:
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<std::optional<std::vector<Correction>>> queue_;
};

struct LearnerConfig {
  double epsilon = 0.1;
  CenterStrategy center = CenterStrategy::mve;
  std::uint64_t seed = 0;
  PlanOptions plan;
  std::optional<Vec> theta_star;  // error tracking only
  int iteration_limit = 0;        // <= 0: use max_iterations()
  bool warm_start = true;
  size_t volume_samples = 0;      // per-iteration volume estimate; 0 disables
  size_t prune_factor = 10;       // prune once rows exceed prune_factor * r
};

struct CutRecord {
  Correction correction;
  Halfspace halfspace;    // raw, as produced by the kernel
  double residual = 0.0;  // <h, theta_k> + b
  std::optional<double> star_value;  // <h, theta_star> + b
};

struct IterationRecord {
  int k = 0;
  Vec theta;
  Trajectory trajectory;
  double plan_gradient_norm = 0.0;
  std::vector<CutRecord> cuts;
  std::optional<double> error;  // |theta_k - theta_star|^2
  std::optional<VolumeEstimate> volume;  // of the space after this iteration's cuts
  SearchSpace space_before;  // Omega_{k-1}
  double wall_ms = 0.0;
};

struct RunHistory {
  std::string task;
  std::string stop_reason;  // satisfied | iteration_limit | infeasible
  std::string message;      // diagnostic when infeasible
  int iteration_bound = 0;
  std::vector<IterationRecord> iterations;
  Vec final_theta;
  SearchSpace final_space;
  std::optional<Vec> theta_star;
};

/// Stepwise form of the learning loop, shared by run_learning and the game
/// service: plan_iteration() then apply_corrections(), repeated.
class Learner {
 public:
  Learner(TaskPreset task, LearnerConfig config);

  /// theta_k = center(Omega_{k-1}), then plans xi(theta_k).
  const IterationRecord& plan_iteration();

  /// Next iteration when the previous one produced no cut: Omega and theta
  /// are unchanged, so the previous trajectory is reused without replanning.
  const IterationRecord& repeat_iteration();

  /// One cut per correction against the latest trajectory. A cut that would
  /// leave the space without interior is rejected with InfeasibleError naming
  /// it; earlier cuts of the same batch stay applied.
  const IterationRecord& apply_corrections(const std::vector<Correction>& corrections);

  const TaskPreset& task() const { return task_; }
  const LearnerConfig& config() const { return config_; }
  const SearchSpace& space() const { return space_; }
  const std::vector<IterationRecord>& records() const { return records_; }
  int k() const { return static_cast<int>(records_.size()); }
  int iteration_bound() const { return bound_; }

 private:
  TaskPreset task_;
  LearnerConfig config_;
  SearchSpace space_;
  std::vector<IterationRecord> records_;
  int bound_ = 0;
};

/// Snapshot of a learner's progress as a run record.
RunHistory make_history(const Learner& learner, std::string stop_reason, std::string message = {});

/// Plans, asks `source` for corrections and cuts until the source stops or the bound is hit.
RunHistory run_learning(const TaskPreset& task, CorrectionSource& source, const LearnerConfig& config);

}  // namespace corrlearn
