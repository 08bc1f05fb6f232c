#include <chrono>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "corrlearn/coactive.hpp"
#include "corrlearn/game.hpp"
#include "corrlearn/history_io.hpp"
#include "corrlearn/logging.hpp"

namespace {

using namespace corrlearn;
using nlohmann::json;

struct Args {
  std::string experiment;
  std::uint64_t seed = 0;
  double epsilon = 0.1;
  std::string center = "mve";
  std::string out = "out";
  std::string theta_star;
  int max_iters = 0;
  std::string config;
  size_t volume_samples = 0;
  bool no_wall_time = false;
  std::string compare_task = "pendulum";
  double step_size = 0.0006;
};

Vec parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("--theta-star: '" + item + "' is not a number");
    }
  }
  return Eigen::Map<Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

TaskPreset load_task(const Args& args, const std::string& preset) {
  TaskPreset task = args.config.empty() ? make_task(preset) : load_task_file(args.config);
  if (!args.theta_star.empty()) {
    Vec v = parse_vector(args.theta_star);
    require_dim(v, task.cost->feature_dim(), "--theta-star");
    task.theta_star = std::move(v);
  }
  return task;
}

LearnerConfig learner_config(const Args& args, const TaskPreset& task) {
  LearnerConfig c;
  c.epsilon = args.epsilon;
  c.center = parse_center_strategy(args.center);
  c.seed = args.seed;
  c.theta_star = task.theta_star;
  c.iteration_limit = args.max_iters;
  c.volume_samples = args.volume_samples;
  return c;
}

json summarize(const RunHistory& run, double wall_ms) {
  json s;
  s["task"] = run.task;
  s["stop_reason"] = run.stop_reason;
  if (!run.message.empty()) s["message"] = run.message;
  s["iterations"] = run.iterations.size();
  s["iteration_bound"] = run.iteration_bound;
  s["final_theta"] = vec_to_json(run.final_theta);
  s["cuts"] = std::accumulate(run.iterations.begin(), run.iterations.end(), size_t{0},
                              [](size_t n, const IterationRecord& r) { return n + r.cuts.size(); });
  if (run.theta_star && run.final_theta.size() > 0) {
    s["theta_star"] = vec_to_json(*run.theta_star);
    s["final_e_theta"] = (run.final_theta - *run.theta_star).squaredNorm();
  }
  s["wall_ms"] = wall_ms;
  return s;
}

void write_outputs(const Args& args, RunHistory run, json summary) {
  const std::filesystem::path dir(args.out);
  if (args.no_wall_time) {
    for (auto& rec : run.iterations) rec.wall_ms = 0.0;
  }
  write_text_file((dir / "history.json").string(), to_json(run).dump(1));
  write_text_file((dir / "convergence.csv").string(), convergence_csv(run, {!args.no_wall_time}));
  summary["experiment"] = args.experiment;
  summary["seed"] = args.seed;
  summary["epsilon"] = args.epsilon;
  summary["center"] = args.center;
  write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
}

double elapsed_ms(std::chrono::steady_clock::time_point start, const Args& args) {
  if (args.no_wall_time) return 0.0;
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

int report(const json& summary) {
  std::cout << summary.dump(2) << std::endl;
  return summary.at("stop_reason") == "infeasible" || summary.at("stop_reason") == "error" ? 2 : 0;
}

int run_oracle(const Args& args, const std::string& preset) {
  const auto start = std::chrono::steady_clock::now();
  const TaskPreset task = load_task(args, preset);
  if (!task.theta_star) throw Error("task '" + task.name + "' has no theta_star; pass --theta-star");
  const LearnerConfig config = learner_config(args, task);
  OracleSource oracle(task.system, task.cost, *task.theta_star, args.seed);
  const RunHistory run = run_learning(task, oracle, config);
  json summary = summarize(run, elapsed_ms(start, args));
  write_outputs(args, run, summary);
  return report(summary);
}

int run_compare(const Args& args) {
  const auto start = std::chrono::steady_clock::now();
  const TaskPreset task = load_task(args, args.compare_task);
  if (!task.theta_star) throw Error("task '" + task.name + "' has no theta_star; pass --theta-star");
  const LearnerConfig config = learner_config(args, task);
  OracleSource oracle(task.system, task.cost, *task.theta_star, args.seed);
  const RunHistory run = run_learning(task, oracle, config);
  if (run.iterations.empty()) throw Error("compare: the proposed method produced no iterations");

  ScriptedSource schedule = shared_schedule(run);
  CoactiveConfig cc;
  cc.step_size = args.step_size;
  cc.iterations = static_cast<int>(run.iterations.size());
  cc.plan = config.plan;
  cc.theta_star = task.theta_star;
  const CoactiveHistory baseline = run_coactive(task, run.iterations.front().theta, schedule, cc);

  json summary = summarize(run, elapsed_ms(start, args));
  json b;
  b["final_theta"] = vec_to_json(baseline.final_theta);
  b["final_e_theta"] = (baseline.final_theta - *task.theta_star).squaredNorm();
  b["iterations"] = baseline.iterations.size();
  b["step_size"] = cc.step_size;
  b["diverged"] = baseline.diverged;
  if (!baseline.message.empty()) b["message"] = baseline.message;
  summary["baseline"] = b;
  summary["proposed_better"] = summary.at("final_e_theta").get<double>() < b.at("final_e_theta").get<double>();
  write_outputs(args, run, summary);
  write_text_file((std::filesystem::path(args.out) / "baseline_convergence.csv").string(),
                  convergence_csv(baseline));
  return report(summary);
}

int run_scripted(const Args& args, const std::string& game) {
  const auto start = std::chrono::steady_clock::now();
  GameOptions options;
  options.iteration_limit = args.max_iters > 0 ? args.max_iters : 50;
  TaskFactory factory = [&args](const std::string& name) { return load_task(args, name); };
  const KeyScript script = game == "arm_game" ? arm_game_script() : quadrotor_game_script();
  const ScriptedGame result = play_key_script(game, script, options, factory, args.seed);
  json summary = summarize(result.history, elapsed_ms(start, args));
  summary["stop_reason"] = result.reason;
  const TaskPreset task = factory(game);
  if (task.obstacle && !result.history.iterations.empty()) {
    const auto* arm = dynamic_cast<const TwoLinkArm*>(task.system.get());
    if (arm) {
      summary["final_clearance"] =
          arm_clearance(*arm, *task.obstacle, result.history.iterations.back().trajectory.states);
      summary["first_clearance"] =
          arm_clearance(*arm, *task.obstacle, result.history.iterations.front().trajectory.states);
    }
  }
  write_outputs(args, result.history, summary);
  write_text_file((std::filesystem::path(args.out) / "transcript.jsonl").string(), [&] {
    std::string text;
    for (const auto& m : result.transcript) text += m.dump() + "\n";
    return text;
  }());
  return report(summary);
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Learning control objectives from directional corrections"};
  Args args;
  app.add_option("--experiment", args.experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember({"pendulum", "arm", "compare", "quadrotor_scripted", "arm_scripted"}));
  app.add_option("--seed", args.seed, "Random seed of the simulated corrections")->capture_default_str();
  app.add_option("--epsilon", args.epsilon, "Termination accuracy in the iteration bound")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--center", args.center, "Center of the search space")
      ->capture_default_str()
      ->check(CLI::IsMember({"mve", "analytic", "chebyshev"}));
  app.add_option("--out", args.out, "Output directory")->capture_default_str();
  app.add_option("--theta-star", args.theta_star, "Comma-separated weights of the simulated human");
  app.add_option("--max-iters", args.max_iters, "Iteration limit (0 uses the theoretical bound)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", args.config, "Task JSON file replacing the experiment's preset")
      ->check(CLI::ExistingFile);
  app.add_option("--volume-samples", args.volume_samples,
                 "Monte Carlo samples for the per-iteration volume estimate (0 disables)")
      ->capture_default_str();
  app.add_flag("--no-wall-time", args.no_wall_time, "Write 0 for timings so reruns are byte-identical");
  app.add_option("--compare-task", args.compare_task, "Task used by the compare experiment")
      ->capture_default_str()
      ->check(CLI::IsMember({"pendulum", "arm"}));
  app.add_option("--step-size", args.step_size, "Baseline step size of the compare experiment")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(args.out);
    if (args.experiment == "pendulum") return run_oracle(args, "pendulum");
    if (args.experiment == "arm") return run_oracle(args, "arm");
    if (args.experiment == "compare") return run_compare(args);
    if (args.experiment == "arm_scripted") return run_scripted(args, "arm_game");
    return run_scripted(args, "quadrotor_game");
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
