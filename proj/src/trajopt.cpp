#include "corrlearn/trajopt.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include <spdlog/spdlog.h>

#include "corrlearn/kernel.hpp"

namespace corrlearn {

namespace {

struct Evaluation {
  Trajectory traj;
  double f = std::numeric_limits<double>::infinity();
  Vec g;
  bool ok = false;
};

class ShootingProblem {
 public:
  ShootingProblem(const SystemModel& system, const FeatureCost& cost, const Vec& theta, const Vec& x0)
      : system_(system), cost_(cost), theta_(theta), x0_(x0) {}

  Evaluation value(const Vec& u) const {
    Evaluation e;
    try {
      e.traj = rollout(system_, x0_, u);
    } catch (const NonFiniteError&) {
      return e;
    }
    e.f = total_cost(cost_, e.traj, theta_);
    e.ok = std::isfinite(e.f);
    return e;
  }

  void gradient(Evaluation& e) const { e.g = cost_gradient(system_, cost_, e.traj, theta_); }

 private:
  const SystemModel& system_;
  const FeatureCost& cost_;
  const Vec& theta_;
  const Vec& x0_;
};

// Two-loop recursion.
Vec lbfgs_direction(const Vec& g, const std::deque<Vec>& S, const std::deque<Vec>& Y) {
  Vec q = -g;
  std::vector<double> alpha(S.size());
  for (size_t i = S.size(); i-- > 0;) {
    alpha[i] = S[i].dot(q) / Y[i].dot(S[i]);
    q -= alpha[i] * Y[i];
  }
  if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
  for (size_t i = 0; i < S.size(); ++i) {
    const double beta = Y[i].dot(q) / Y[i].dot(S[i]);
    q += (alpha[i] - beta) * S[i];
  }
  return q;
}

}  // namespace

PlanResult plan_detailed(const SystemModel& system, const FeatureCost& cost, const Vec& theta,
                         const Vec& x0, int horizon, const PlanOptions& opts) {
  if (horizon < 1) throw Error("plan: horizon must be at least 1");
  if (opts.max_iterations < 1) throw Error("plan: max_iterations must be at least 1");
  if (!(opts.gradient_tolerance > 0.0)) throw Error("plan: gradient tolerance must be positive");
  require_dim(theta, cost.feature_dim(), "theta");
  require_dim(x0, system.state_dim(), "x0");
  if (!theta.allFinite()) throw NonFiniteError("plan: theta is not finite");

  const int m = system.input_dim();
  Vec u = Vec::Zero(static_cast<Eigen::Index>(m) * (horizon + 1));
  if (opts.initial_controls) {
    require_dim(*opts.initial_controls, u.size(), "initial controls");
    u = *opts.initial_controls;
  }

  const ShootingProblem problem(system, cost, theta, x0);
  Evaluation cur = problem.value(u);
  if (!cur.ok) throw NonFiniteError("plan: cost is not finite at the initial controls");
  problem.gradient(cur);

  std::deque<Vec> S, Y;
  int it = 0;
  double gnorm = cur.g.lpNorm<Eigen::Infinity>();
  while (gnorm > opts.gradient_tolerance && it < opts.max_iterations) {
    Vec dir = lbfgs_direction(cur.g, S, Y);
    double slope = cur.g.dot(dir);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      dir = -cur.g;
      slope = cur.g.dot(dir);
    }

    // Armijo backtracking; a first step along steepest descent is scaled to
    // unit length so the initial trial is sensible.
    double step = S.empty() ? std::min(1.0, 1.0 / dir.norm()) : 1.0;
    Evaluation next;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, step *= opts.shrink) {
      next = problem.value(u + step * dir);
      if (!next.ok) continue;
      if (next.f <= cur.f + opts.sufficient_decrease * step * slope) {
        accepted = true;
        break;
      }
      if (next.f <= cur.f + 1e-12 * (1.0 + std::abs(cur.f))) {
        // Below roundoff the decrease test is meaningless; keep the step if
        // the cost is unchanged to working precision and the gradient shrinks.
        problem.gradient(next);
        if (next.g.lpNorm<Eigen::Infinity>() < gnorm) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      if (S.empty()) break;  // steepest descent failed too
      S.clear();
      Y.clear();
      continue;
    }
    if (next.g.size() == 0) problem.gradient(next);

    const Vec s = step * dir;
    const Vec y = next.g - cur.g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      if (static_cast<int>(S.size()) > opts.memory) {
        S.pop_front();
        Y.pop_front();
      }
    }
    u += s;
    cur = std::move(next);
    gnorm = cur.g.lpNorm<Eigen::Infinity>();
    ++it;
  }

  PlanResult out{cur.traj, cur.f, gnorm, it, gnorm <= opts.gradient_tolerance};
  if (!out.converged) {
    spdlog::debug("plan: stopped after {} iterations, |grad|_inf = {:.3e}", it, gnorm);
    if (opts.require_convergence) {
      throw ConvergenceError("plan: gradient tolerance not reached after " + std::to_string(it) +
                                 " iterations (|grad|_inf = " + std::to_string(gnorm) + ")",
                             gnorm);
    }
  }
  return out;
}

Trajectory plan(const SystemModel& system, const FeatureCost& cost, const Vec& theta,
                const Vec& x0, int horizon, const PlanOptions& opts) {
  return plan_detailed(system, cost, theta, x0, horizon, opts).trajectory;
}

}  // namespace corrlearn
