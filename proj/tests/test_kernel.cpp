#include <gtest/gtest.h>

#include "corrlearn/kernel.hpp"
#include "corrlearn/learner.hpp"
#include "corrlearn/tasks.hpp"
#include "corrlearn/trajopt.hpp"
#include "test_support.hpp"

namespace corrlearn {
namespace {

using testing::random_vec;
using testing::relative_error;

TEST(Kernel, ScalarSystemOneStepByHand) {
  auto sys = testing::scalar_integrator();
  const testing::ScalarQuadraticCost cost(3.0);
  const double x0 = 0.5, u0 = -0.2, u1 = 0.4;
  const Trajectory traj = rollout(*sys, Vec::Constant(1, x0), (Vec(2) << u0, u1).finished());
  const double x1 = x0 + u0;
  const KernelMatrices k = recursive_kernel(*sys, cost, traj);
  const Mat H1 = (Mat(2, 2) << 2 * x1, 2 * u0, 0, 2 * u1).finished();
  const Mat H2 = (Mat(2, 1) << 1, 1).finished();
  EXPECT_LT((k.H1 - H1).norm(), 1e-15);
  EXPECT_LT((k.H2 - H2).norm(), 1e-15);
}

TEST(Kernel, RecursiveMatchesDense) {
  std::mt19937_64 rng(21);
  const std::vector<std::string> tasks = {"pendulum", "arm"};
  int instances = 0;
  for (int i = 0; i < 50; ++i) {
    const TaskPreset task = make_task(tasks[i % 2]);
    const int T = 1 + i % 5;
    const Vec x0 = testing::random_state(*task.system, rng);
    const Trajectory traj = rollout(*task.system, x0, random_vec(rng, task.system->input_dim() * (T + 1)));
    const KernelMatrices a = recursive_kernel(*task.system, *task.cost, traj);
    const KernelMatrices b = dense_kernel(*task.system, *task.cost, traj);
    EXPECT_LE(relative_error(a.H1, b.H1), 1e-9);
    EXPECT_LE(relative_error(a.H2, b.H2), 1e-9);
    ++instances;
  }
  EXPECT_EQ(instances, 50);
}

TEST(Kernel, QuadrotorRecursiveMatchesDense) {
  std::mt19937_64 rng(8);
  const TaskPreset task = make_task("quadrotor_game");
  const Trajectory traj = rollout(*task.system, task.x0, random_vec(rng, 4 * 6, 3.0));
  const KernelMatrices a = recursive_kernel(*task.system, *task.cost, traj);
  const KernelMatrices b = dense_kernel(*task.system, *task.cost, traj);
  EXPECT_LE(relative_error(a.H1, b.H1), 1e-9);
  EXPECT_LE(relative_error(a.H2, b.H2), 1e-9);
}

TEST(Kernel, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(34);
  const std::vector<std::string> tasks = {"pendulum", "arm", "quadrotor_game"};
  for (int i = 0; i < 20; ++i) {
    const TaskPreset task = make_task(tasks[i % 3]);
    const int T = 2 + i % 6;
    const int m = task.system->input_dim();
    const Vec u = random_vec(rng, m * (T + 1), 0.5);
    const Vec theta = testing::uniform_vec(rng, task.initial_box.lower, task.initial_box.upper);
    const Trajectory traj = rollout(*task.system, task.x0, u);
    const Vec g = cost_gradient(*task.system, *task.cost, traj, theta);
    const Mat fd = testing::fd_jacobian(
        [&](const Vec& v) {
          return Vec::Constant(1, total_cost(*task.cost, rollout(*task.system, task.x0, v), theta));
        },
        u, 1e-5);
    EXPECT_LE(relative_error(g.transpose(), fd), 1e-4) << task.name << " T=" << T;
  }
}

TEST(Kernel, EmbedCorrection) {
  const Vec a = embed_correction({(Vec(2) << 1, -1).finished(), 2}, 2, 3);
  EXPECT_EQ(a, (Vec(8) << 0, 0, 0, 0, 1, -1, 0, 0).finished());
  EXPECT_THROW(embed_correction({Vec::Ones(2), 4}, 2, 3), Error);
  EXPECT_THROW(embed_correction({Vec::Ones(3), 0}, 2, 3), DimensionError);
}

TEST(Kernel, HalfspaceUsesOnlyCorrectionBlock) {
  std::mt19937_64 rng(6);
  const TaskPreset task = make_task("arm");
  const Trajectory traj = rollout(*task.system, task.x0, random_vec(rng, 2 * 11));
  const KernelMatrices k = recursive_kernel(*task.system, *task.cost, traj);
  const Correction corr{(Vec(2) << 1, -1).finished(), 4};
  const Halfspace h = correction_halfspace(*task.system, *task.cost, traj, corr);
  const Vec a = embed_correction(corr, 2, 10);
  EXPECT_LT((h.normal - k.H1.transpose() * a).norm(), 1e-12);
  const Vec grad_h = task.cost->final_gradient(traj.final_state());
  EXPECT_NEAR(h.offset, a.dot(k.H2 * grad_h), 1e-12);
}

TEST(Kernel, ZeroDirectionIsRejected) {
  const TaskPreset task = make_task("pendulum");
  const Trajectory traj = rollout(*task.system, task.x0, Vec::Zero(31));
  EXPECT_THROW(correction_halfspace(*task.system, *task.cost, traj, {Vec::Zero(1), 3}), Error);
}

TEST(Kernel, CutPassesThroughGuessAndKeepsTarget) {
  std::mt19937_64 rng(12);
  for (const std::string name : {"pendulum", "arm"}) {
    const TaskPreset task = make_task(name);
    for (int i = 0; i < 5; ++i) {
      const Vec theta = testing::uniform_vec(rng, task.initial_box.lower, task.initial_box.upper);
      const Trajectory traj = plan(*task.system, *task.cost, theta, task.x0, task.horizon);
      auto corr = oracle_correction(*task.system, *task.cost, traj, *task.theta_star, rng);
      ASSERT_TRUE(corr.has_value());
      const Halfspace h = correction_halfspace(*task.system, *task.cost, traj, *corr);
      EXPECT_LE(std::abs(h.value(theta)), h.normal.norm() * 1e-5) << name;
      EXPECT_LT(h.value(*task.theta_star), 0.0) << name;
    }
  }
}

}  // namespace
}  // namespace corrlearn
