#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "corrlearn/coactive.hpp"
#include "corrlearn/game.hpp"
#include "corrlearn/kernel.hpp"
#include "corrlearn/learner.hpp"
#include "corrlearn/polytope.hpp"
#include "corrlearn/tasks.hpp"
#include "mve_oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace corrlearn;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct InvariantTally {
  long cuts = 0;
  long spaces = 0;
  long violations = 0;
  double worst_residual_ratio = 0.0;

  void check(const RunHistory& run, const std::optional<Vec>& theta_star) {
    for (const auto& rec : run.iterations) {
      if (theta_star) {
        ++spaces;
        if (!rec.space_before.contains(*theta_star, 1e-9)) ++violations;
      }
      for (const auto& cut : rec.cuts) {
        ++cuts;
        const double bound = cut.correction.direction.norm() * 1e-5;
        worst_residual_ratio = std::max(worst_residual_ratio, std::abs(cut.residual) / bound);
        if (std::abs(cut.residual) > bound) ++violations;
      }
    }
    if (theta_star) {
      ++spaces;
      if (!run.final_space.contains(*theta_star, 1e-9)) ++violations;
    }
  }
};

struct OracleRuns {
  std::vector<RunHistory> runs;
  double seconds = 0.0;
};

OracleRuns oracle_runs(const std::string& preset, int seeds, size_t volume_samples) {
  OracleRuns out;
  const auto start = Clock::now();
  for (int seed = 0; seed < seeds; ++seed) {
    const TaskPreset task = make_task(preset);
    LearnerConfig config;
    config.epsilon = 0.1;
    config.seed = static_cast<std::uint64_t>(seed);
    config.theta_star = task.theta_star;
    config.volume_samples = volume_samples;
    OracleSource oracle(task.system, task.cost, *task.theta_star, config.seed);
    out.runs.push_back(run_learning(task, oracle, config));
  }
  out.seconds = seconds_since(start);
  return out;
}

Outcome convergence(const OracleRuns& r, const Vec& theta_star, int bound, double time_limit) {
  Outcome o{true, ""};
  double worst = 0.0;
  size_t most_iters = 0;
  for (const auto& run : r.runs) {
    const double e = run.final_theta.size() ? (run.final_theta - theta_star).squaredNorm() : INFINITY;
    worst = std::max(worst, e);
    most_iters = std::max(most_iters, run.iterations.size());
    if (!(e < 0.1) || static_cast<int>(run.iterations.size()) > bound || run.stop_reason == "infeasible") {
      o.pass = false;
    }
  }
  if (r.seconds >= time_limit) o.pass = false;
  o.detail = fmt::format("{} runs, worst final e_theta {:.3g}, most iterations {} (bound {}), {:.1f} s (limit {:.0f} s)",
                    r.runs.size(), worst, most_iters, bound, r.seconds, time_limit);
  return o;
}

Outcome criterion1() {
  const auto start = Clock::now();
  const int a = max_iterations(4, 5.0, 0.1);
  const int b = max_iterations(5, 4.0, 0.1);
  const double s = seconds_since(start);
  return {a == 55 && b == 83 && s < 1.0, fmt::format("K(4,5,0.1)={} K(5,4,0.1)={} in {:.2g} s", a, b, s)};
}

Outcome criterion4(const std::vector<const RunHistory*>& runs) {
  InvariantTally tally;
  for (const auto* run : runs) tally.check(*run, run->theta_star);
  return {tally.violations == 0 && tally.cuts > 0,
          fmt::format("{} runs, {} spaces checked, {} cuts, {} violations, worst residual {:.3g} of tolerance",
                 runs.size(), tally.spaces, tally.cuts, tally.violations, tally.worst_residual_ratio)};
}

Outcome criterion5(const OracleRuns& r) {
  long total = 0, within = 0;
  for (const auto& run : r.runs) {
    double prev = run.iterations.empty() ? 0.0 : run.iterations.front().space_before.box().volume();
    double prev_sigma = 0.0;
    for (const auto& rec : run.iterations) {
      if (!rec.volume) continue;
      const double cur = rec.volume->volume;
      const double cur_sigma = rec.volume->std_error;
      if (!rec.cuts.empty() && prev > 0.0) {
        const double ratio = cur / prev;
        const double rel = std::hypot(cur > 0 ? cur_sigma / cur : 0.0, prev_sigma / prev);
        const double sigma = ratio * rel;
        ++total;
        if (ratio <= 0.75 + 3.0 * sigma) ++within;
      }
      prev = cur;
      prev_sigma = cur_sigma;
    }
  }
  const double frac = total ? static_cast<double>(within) / total : 0.0;
  return {total > 0 && frac >= 0.95,
          fmt::format("{} of {} iterations with ratio <= 0.75 + 3 sigma ({:.1f}%, need 95%), 1e5 samples each",
                 within, total, 100.0 * frac)};
}

Outcome criterion6() {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> tasks = {"pendulum", "arm"};
  double worst_kernel = 0.0;
  for (int i = 0; i < 50; ++i) {
    const TaskPreset task = make_task(tasks[i % 2]);
    const int T = 1 + i % 5;
    const Vec x0 = testing::random_state(*task.system, rng);
    const Trajectory traj =
        rollout(*task.system, x0, testing::random_vec(rng, task.system->input_dim() * (T + 1)));
    const KernelMatrices a = recursive_kernel(*task.system, *task.cost, traj);
    const KernelMatrices b = dense_kernel(*task.system, *task.cost, traj);
    worst_kernel = std::max({worst_kernel, testing::relative_error(a.H1, b.H1), testing::relative_error(a.H2, b.H2)});
  }
  double worst_grad = 0.0;
  for (int i = 0; i < 20; ++i) {
    const TaskPreset task = make_task(tasks[i % 2]);
    const int T = 2 + i % 6;
    const Vec u = testing::random_vec(rng, task.system->input_dim() * (T + 1), 0.5);
    const Vec theta = testing::uniform_vec(rng, task.initial_box.lower, task.initial_box.upper);
    const Vec g = cost_gradient(*task.system, *task.cost, rollout(*task.system, task.x0, u), theta);
    const Mat fd = testing::fd_jacobian(
        [&](const Vec& v) {
          return Vec::Constant(1, total_cost(*task.cost, rollout(*task.system, task.x0, v), theta));
        },
        u, 1e-5);
    worst_grad = std::max(worst_grad, testing::relative_error(g.transpose(), fd));
  }
  return {worst_kernel <= 1e-9 && worst_grad <= 1e-4,
          fmt::format("kernel worst relative Frobenius {:.3g} over 50 instances; gradient vs FD worst {:.3g} over 20",
                 worst_kernel, worst_grad)};
}

Outcome criterion7() {
  double box_err = 0.0;
  const std::vector<BoxBounds> boxes = {
      BoxBounds::uniform(2, -1.0, 1.0), BoxBounds::uniform(4, 0.0, 5.0),
      BoxBounds((Vec(3) << 0, -3, 0).finished(), (Vec(3) << 1, 3, 0.5).finished()),
      BoxBounds::uniform(5, 0.0, 4.0)};
  for (const auto& box : boxes) {
    const Ellipsoid e = mve_center(SearchSpace::from_box(box));
    const Mat expected = Vec(0.5 * (box.upper - box.lower)).asDiagonal().toDenseMatrix();
    box_err = std::max({box_err, (e.center - box.center()).norm(), (e.shape - expected).norm()});
  }

  std::mt19937_64 rng(42);
  double worst_center = 0.0;
  long outside = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const SearchSpace s = testing::random_polygon(rng, 1 + trial % 6);
    const Ellipsoid e = mve_center(s);
    worst_center = std::max(worst_center, (e.center - testing::mve_center_oracle(s)).norm());
    for (int i = 0; i < 200; ++i) {
      const double a = 2.0 * M_PI * i / 200.0;
      const Vec p = e.center + e.shape * (Vec(2) << std::cos(a), std::sin(a)).finished();
      if (!s.contains(p, 1e-9)) ++outside;
    }
  }
  return {box_err <= 1e-6 && worst_center <= 1e-2 && outside == 0,
          fmt::format("box error {:.2g}; 20 polygons worst center distance {:.3g}; {} of 4000 boundary samples outside",
                 box_err, worst_center, outside)};
}

Outcome criterion8(const OracleRuns& proposed) {
  int better = 0;
  std::ostringstream pairs;
  for (size_t seed = 0; seed < proposed.runs.size(); ++seed) {
    const RunHistory& run = proposed.runs[seed];
    const TaskPreset task = make_task("pendulum");
    ScriptedSource schedule = shared_schedule(run);
    CoactiveConfig cc;
    cc.step_size = 0.0006;
    cc.iterations = static_cast<int>(run.iterations.size());
    cc.theta_star = task.theta_star;
    const CoactiveHistory baseline = run_coactive(task, run.iterations.front().theta, schedule, cc);
    const double e_prop = (run.final_theta - *task.theta_star).squaredNorm();
    const double e_base = (baseline.final_theta - *task.theta_star).squaredNorm();
    if (e_prop < e_base) ++better;
    pairs << (seed ? ", " : "") << fmt::format("{:.3g}<{:.3g}", e_prop, e_base);
  }
  return {better == static_cast<int>(proposed.runs.size()) && better == 5,
          fmt::format("proposed better on {}/{} seeds (e_theta proposed<baseline: {})", better, proposed.runs.size(),
                 pairs.str())};
}

Outcome criterion9(RunHistory& game_run) {
  GameOptions options;
  const ScriptedGame g = play_key_script("arm_game", arm_game_script(), options, make_task, 0);
  game_run = g.history;
  const TaskPreset task = make_task("arm_game");
  const auto* arm = dynamic_cast<const TwoLinkArm*>(task.system.get());
  const auto& iters = g.history.iterations;
  const double clearance =
      iters.empty() || !arm ? -INFINITY : arm_clearance(*arm, *task.obstacle, iters.back().trajectory.states);
  InvariantTally tally;
  tally.check(g.history, std::nullopt);
  const bool ok = g.reason == "confirmed" && iters.size() <= 10 && clearance > 0.0 && tally.violations == 0;
  return {ok, fmt::format("{} after {} iterations, {} cuts, final clearance {:.3f}, {} residual violations",
                     g.reason, iters.size(), tally.cuts, clearance, tally.violations)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  int failures = 0;
  auto print = [&](int id, const Outcome& o) {
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };
  auto guarded = [](const std::function<Outcome()>& f) -> Outcome {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  print(1, guarded(criterion1));

  OracleRuns pendulum, arm, pendulum_volume;
  print(2, guarded([&] {
          pendulum = oracle_runs("pendulum", 5, 0);
          return convergence(pendulum, *make_task("pendulum").theta_star, 55, 120.0);
        }));
  print(3, guarded([&] {
          arm = oracle_runs("arm", 3, 0);
          return convergence(arm, *make_task("arm").theta_star, 83, 600.0);
        }));

  RunHistory game_run;
  const Outcome c9 = guarded([&] { return criterion9(game_run); });
  print(4, guarded([&] {
          std::vector<const RunHistory*> all;
          for (const auto& r : pendulum.runs) all.push_back(&r);
          for (const auto& r : arm.runs) all.push_back(&r);
          if (all.size() != 8) throw Error("criterion 2 or 3 runs are missing");
          return criterion4(all);
        }));
  print(5, guarded([&] {
          pendulum_volume = oracle_runs("pendulum", 5, 100000);
          return criterion5(pendulum_volume);
        }));
  print(6, guarded(criterion6));
  print(7, guarded(criterion7));
  print(8, guarded([&] {
          if (pendulum.runs.size() != 5) throw Error("criterion 2 runs are missing");
          return criterion8(pendulum);
        }));
  print(9, c9);

  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
