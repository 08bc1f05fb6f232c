#include <thread>

#include <gtest/gtest.h>

#include "corrlearn/learner.hpp"
#include "test_support.hpp"

namespace corrlearn {

void PrintTo(CenterStrategy s, std::ostream* os) { *os << to_string(s); }

namespace {

TEST(IterationBound, KnownValues) {
  EXPECT_EQ(max_iterations(4, 5.0, 0.1), 55);
  EXPECT_EQ(max_iterations(5, 4.0, 0.1), 83);
  EXPECT_EQ(max_iterations(4, 5.0, 5.0), 0);
}

TEST(IterationBound, RejectsInvalidArguments) {
  EXPECT_THROW(max_iterations(1, 5.0, 0.1), Error);
  EXPECT_THROW(max_iterations(4, 5.0, 0.0), Error);
  EXPECT_THROW(max_iterations(4, 5.0, 6.0), Error);
}

TEST(CenterStrategy, ParseAndPrint) {
  for (const std::string name : {"mve", "analytic", "chebyshev"}) {
    EXPECT_EQ(to_string(parse_center_strategy(name)), name);
  }
  EXPECT_THROW(parse_center_strategy("centroid"), Error);
}

TEST(CenterStrategy, AllAgreeOnBoxes) {
  const SearchSpace s = SearchSpace::from_box(BoxBounds::uniform(4, 0.0, 5.0));
  for (auto c : {CenterStrategy::mve, CenterStrategy::analytic, CenterStrategy::chebyshev}) {
    EXPECT_LT((compute_center(s, c) - Vec::Constant(4, 2.5)).norm(), 1e-6) << to_string(c);
  }
}

TEST(Oracle, SilentAtTheOptimum) {
  const TaskPreset task = make_task("pendulum");
  const Trajectory traj = plan(*task.system, *task.cost, *task.theta_star, task.x0, task.horizon);
  std::mt19937_64 rng(1);
  EXPECT_FALSE(oracle_correction(*task.system, *task.cost, traj, *task.theta_star, rng).has_value());
}

TEST(Oracle, ArmCorrectionShape) {
  const TaskPreset task = make_task("arm");
  const Trajectory traj = plan(*task.system, *task.cost, task.initial_box.center(), task.x0, task.horizon);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto c = oracle_correction(*task.system, *task.cost, traj, *task.theta_star, rng);
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(c->direction.size(), 2);
    EXPECT_GE(c->time, 0);
    EXPECT_LE(c->time, task.horizon);
    EXPECT_FALSE(c->direction.isZero());
    for (Eigen::Index j = 0; j < 2; ++j) EXPECT_EQ(std::abs(c->direction(j)) * (std::abs(c->direction(j)) - 1.0), 0.0);
  }
}

LearnerConfig config_for(const TaskPreset& task, CenterStrategy center = CenterStrategy::mve) {
  LearnerConfig c;
  c.center = center;
  c.theta_star = task.theta_star;
  return c;
}

void expect_cut_invariants(const RunHistory& run) {
  for (const auto& rec : run.iterations) {
    EXPECT_TRUE(rec.space_before.contains(rec.theta, 1e-9)) << "k=" << rec.k;
    for (const auto& cut : rec.cuts) {
      EXPECT_LE(std::abs(cut.residual), cut.correction.direction.norm() * 1e-5) << "k=" << rec.k;
      ASSERT_TRUE(cut.star_value.has_value());
      EXPECT_LT(*cut.star_value, 0.0) << "k=" << rec.k;
    }
  }
  ASSERT_TRUE(run.theta_star.has_value());
  EXPECT_TRUE(run.final_space.contains(*run.theta_star));
}

TEST(Learning, PendulumConvergesWithinBound) {
  const TaskPreset task = make_task("pendulum");
  OracleSource oracle(task.system, task.cost, *task.theta_star, 3);
  const RunHistory run = run_learning(task, oracle, config_for(task));
  EXPECT_EQ(run.iteration_bound, 55);
  ASSERT_LE(run.iterations.size(), 55u);
  EXPECT_GT(*run.iterations.front().error, 1.0);
  EXPECT_LT((run.final_theta - *task.theta_star).squaredNorm(), 0.1);
  expect_cut_invariants(run);
}

class CenterRun : public ::testing::TestWithParam<CenterStrategy> {};

TEST_P(CenterRun, ShortRunKeepsInvariants) {
  const TaskPreset task = make_task("pendulum");
  OracleSource oracle(task.system, task.cost, *task.theta_star, 11);
  LearnerConfig config = config_for(task, GetParam());
  config.iteration_limit = 15;
  const RunHistory run = run_learning(task, oracle, config);
  EXPECT_EQ(run.iterations.size(), 15u);
  EXPECT_EQ(run.stop_reason, "iteration_limit");
  expect_cut_invariants(run);
  EXPECT_LT(*run.iterations.back().error, *run.iterations.front().error);
}

INSTANTIATE_TEST_SUITE_P(Strategies, CenterRun,
                         ::testing::Values(CenterStrategy::mve, CenterStrategy::analytic, CenterStrategy::chebyshev),
                         [](const auto& info) { return to_string(info.param); });

TEST(Learning, VolumeShrinks) {
  const TaskPreset task = make_task("pendulum");
  OracleSource oracle(task.system, task.cost, *task.theta_star, 5);
  LearnerConfig config = config_for(task);
  config.iteration_limit = 8;
  config.volume_samples = 20000;
  const RunHistory run = run_learning(task, oracle, config);
  double previous = task.initial_box.volume();
  for (const auto& rec : run.iterations) {
    ASSERT_TRUE(rec.volume.has_value());
    EXPECT_LT(rec.volume->volume, previous + 3.0 * rec.volume->std_error);
    previous = rec.volume->volume;
  }
  EXPECT_LT(previous, 0.5 * task.initial_box.volume());
}

TEST(Learning, EmptyBatchRepeatsTrajectory) {
  const TaskPreset task = make_task("pendulum");
  ScriptedSource script({{1, {}}, {2, {{Vec::Ones(1), 5}}}, {3, {}}});
  LearnerConfig config = config_for(task);
  const RunHistory run = run_learning(task, script, config);
  ASSERT_EQ(run.iterations.size(), 4u);
  EXPECT_EQ(run.stop_reason, "satisfied");
  EXPECT_EQ(run.iterations[0].theta, run.iterations[1].theta);
  EXPECT_EQ(run.iterations[0].trajectory.stacked_controls(), run.iterations[1].trajectory.stacked_controls());
  EXPECT_EQ(run.iterations[1].cuts.size(), 1u);
  EXPECT_NE(run.iterations[2].theta, run.iterations[1].theta);
  EXPECT_EQ(run.iterations[3].theta, run.iterations[2].theta);
  EXPECT_EQ(run.final_space.cut_count(), 1u);
}

TEST(Learning, ContradictoryCorrectionsStopAsInfeasible) {
  const TaskPreset task = make_task("pendulum");
  ScriptedSource script({{1, {{Vec::Ones(1), 4}, {-Vec::Ones(1), 4}}}});
  const RunHistory run = run_learning(task, script, config_for(task));
  EXPECT_EQ(run.stop_reason, "infeasible");
  EXPECT_NE(run.message.find("iteration 1"), std::string::npos);
  EXPECT_NE(run.message.find("t_k=4"), std::string::npos);
  EXPECT_EQ(run.final_space.cut_count(), 1u);
}

TEST(Learner, StepwiseUse) {
  const TaskPreset task = make_task("pendulum");
  Learner learner(task, config_for(task));
  EXPECT_THROW(learner.apply_corrections({}), Error);
  const IterationRecord& first = learner.plan_iteration();
  EXPECT_EQ(first.k, 1);
  EXPECT_LT((first.theta - task.initial_box.center()).norm(), 1e-6);
  learner.apply_corrections({{Vec::Ones(1), 2}});
  EXPECT_THROW(learner.repeat_iteration(), Error);
  EXPECT_EQ(learner.plan_iteration().k, 2);
  EXPECT_EQ(learner.space().cut_count(), 1u);
}

TEST(Learner, RejectsWrongThetaStar) {
  const TaskPreset task = make_task("pendulum");
  LearnerConfig config;
  config.theta_star = Vec::Ones(3);
  EXPECT_THROW(Learner(task, config), DimensionError);
}

TEST(Learner, PrunesRedundantRows) {
  const TaskPreset task = make_task("pendulum");
  OracleSource oracle(task.system, task.cost, *task.theta_star, 2);
  LearnerConfig config = config_for(task);
  config.prune_factor = 3;
  config.iteration_limit = 30;
  const RunHistory run = run_learning(task, oracle, config);
  EXPECT_LE(run.final_space.row_count(), 3u * 4u + 1u);
  expect_cut_invariants(run);
}

TEST(ChannelSource, DeliversBatchesInOrder) {
  ChannelSource channel;
  std::thread producer([&] {
    channel.push({{Vec::Ones(1), 1}});
    channel.push({});
    channel.finish();
  });
  const Trajectory dummy;
  auto a = channel.corrections(1, dummy);
  auto b = channel.corrections(2, dummy);
  auto c = channel.corrections(3, dummy);
  producer.join();
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->size(), 1u);
  EXPECT_TRUE(b->empty());
  EXPECT_FALSE(c.has_value());
}

TEST(ScriptedSource, MissingAndPastTheEnd) {
  ScriptedSource s({{2, {{Vec::Ones(1), 0}}}});
  const Trajectory dummy;
  EXPECT_TRUE(s.corrections(1, dummy)->empty());
  EXPECT_EQ(s.corrections(2, dummy)->size(), 1u);
  EXPECT_FALSE(s.corrections(3, dummy).has_value());
}

}  // namespace
}  // namespace corrlearn
