#include "corrlearn/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace corrlearn {

namespace {

TaskPreset pendulum_task() {
  TaskPreset t;
  t.name = "pendulum";
  t.system = std::make_shared<Pendulum>();
  t.cost = std::make_shared<PendulumCost>();
  t.x0 = Vec::Zero(2);
  t.horizon = 30;
  t.initial_box = BoxBounds::uniform(4, 0.0, 5.0);
  t.theta_star = Vec::Constant(4, 0.5);
  return t;
}

TaskPreset arm_task() {
  TaskPreset t;
  t.name = "arm";
  t.system = std::make_shared<TwoLinkArm>();
  t.cost = std::make_shared<ArmCost>();
  t.x0 = Vec::Zero(4);
  t.horizon = 50;
  t.initial_box = BoxBounds::uniform(5, 0.0, 4.0);
  t.theta_star = Vec::Ones(5);
  return t;
}

TaskPreset arm_game_task() {
  TaskPreset t = arm_task();
  t.name = "arm_game";
  t.x0 = Vec::Zero(4);
  t.x0(0) = -M_PI / 2.0;
  Vec lo(5), hi(5);
  lo << 0.0, -3.0, 0.0, -3.0, 0.0;
  hi << 1.0, 3.0, 1.0, 3.0, 0.5;
  t.initial_box = BoxBounds(lo, hi);
  t.theta_star.reset();
  t.obstacle = CircleObstacle{Eigen::Vector2d(1.6, -0.7), 0.3};
  return t;
}

TaskPreset quadrotor_game_task() {
  TaskPreset t;
  t.name = "quadrotor_game";
  t.system = std::make_shared<Quadrotor>();
  t.cost = std::make_shared<QuadrotorCost>();
  t.x0 = Vec::Zero(13);
  t.x0.head(3) << -8.0, -8.0, 5.0;
  t.x0(6) = 1.0;
  t.horizon = 50;
  Vec lo(7), hi(7);
  lo << 0.0, -8.0, 0.0, -8.0, 0.0, -8.0, 0.0;
  hi << 1.0, 8.0, 1.0, 8.0, 1.0, 8.0, 0.5;
  t.initial_box = BoxBounds(lo, hi);
  t.gate = Gate{Eigen::Vector3d(0.0, 0.0, 3.0), 2.0, M_PI / 4.0};
  return t;
}

Eigen::Vector2d vec2(const nlohmann::json& j) {
  const Vec v = vec_from_json(j);
  require_dim(v, 2, "2-vector");
  return v;
}

Eigen::Vector3d vec3(const nlohmann::json& j) {
  const Vec v = vec_from_json(j);
  require_dim(v, 3, "3-vector");
  return v;
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

// Rebuilds system and cost with parameter overrides.
void apply_params(TaskPreset& t, const nlohmann::json& params, std::optional<double> dt) {
  const std::string kind = t.system->kind();
  if (kind == "pendulum") {
    PendulumParams p = static_cast<const Pendulum&>(*t.system).params();
    read_if(params, "gravity", p.gravity);
    read_if(params, "length", p.length);
    read_if(params, "mass", p.mass);
    read_if(params, "damping", p.damping);
    if (dt) p.dt = *dt;
    t.system = std::make_shared<Pendulum>(p);
  } else if (kind == "arm") {
    ArmParams p = static_cast<const TwoLinkArm&>(*t.system).params();
    read_if(params, "mass1", p.mass1);
    read_if(params, "mass2", p.mass2);
    read_if(params, "length1", p.length1);
    read_if(params, "length2", p.length2);
    read_if(params, "inertia1", p.inertia1);
    read_if(params, "inertia2", p.inertia2);
    if (dt) p.dt = *dt;
    t.system = std::make_shared<TwoLinkArm>(p);
  } else if (kind == "quadrotor") {
    QuadrotorParams p = static_cast<const Quadrotor&>(*t.system).params();
    read_if(params, "mass", p.mass);
    read_if(params, "gravity", p.gravity);
    read_if(params, "wing_length", p.wing_length);
    read_if(params, "torque_constant", p.torque_constant);
    if (params.contains("inertia")) {
      const Vec diag = vec_from_json(params.at("inertia"));
      require_dim(diag, 3, "inertia diagonal");
      p.inertia = diag.asDiagonal();
    }
    if (dt) p.dt = *dt;
    t.system = std::make_shared<Quadrotor>(p);
  }
}

}  // namespace

std::vector<std::string> task_names() { return {"pendulum", "arm", "arm_game", "quadrotor_game"}; }

TaskPreset make_task(const std::string& name) {
  if (name == "pendulum") return pendulum_task();
  if (name == "arm") return arm_task();
  if (name == "arm_game") return arm_game_task();
  if (name == "quadrotor_game") return quadrotor_game_task();
  throw Error("unknown task preset '" + name + "'");
}

TaskPreset task_from_json(const nlohmann::json& j) {
  TaskPreset t = make_task(j.at("task").get<std::string>());
  std::optional<double> dt;
  if (j.contains("dt")) dt = j.at("dt").get<double>();
  if (dt || j.contains("params")) apply_params(t, j.value("params", nlohmann::json::object()), dt);
  if (j.contains("horizon")) {
    t.horizon = j.at("horizon").get<int>();
    if (t.horizon < 1) throw Error("task config: horizon must be at least 1");
  }
  if (j.contains("x0")) {
    t.x0 = vec_from_json(j.at("x0"));
    require_dim(t.x0, t.system->state_dim(), "x0");
  }
  if (j.contains("theta_star")) {
    t.theta_star = vec_from_json(j.at("theta_star"));
    require_dim(*t.theta_star, t.cost->feature_dim(), "theta_star");
  }
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    t.initial_box = BoxBounds(vec_from_json(b.at("lower")), vec_from_json(b.at("upper")));
    require_dim(t.initial_box.lower, t.cost->feature_dim(), "bounds");
  }
  if (j.contains("obstacle")) {
    const auto& o = j.at("obstacle");
    t.obstacle = CircleObstacle{vec2(o.at("center")), o.at("radius").get<double>()};
    if (!(t.obstacle->radius > 0.0)) throw Error("task config: obstacle radius must be positive");
  }
  if (j.contains("gate")) {
    const auto& g = j.at("gate");
    t.gate = Gate{vec3(g.at("center")), g.at("width").get<double>(), g.value("yaw", 0.0)};
  }
  return t;
}

TaskPreset load_task_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open task config '" + path + "'");
  return task_from_json(nlohmann::json::parse(in));
}

double arm_clearance(const TwoLinkArm& arm, const CircleObstacle& obstacle,
                     const std::vector<Vec>& states) {
  auto segment_distance = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                             const Eigen::Vector2d& p) {
    const Eigen::Vector2d ab = b - a;
    const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + s * ab - p).norm();
  };
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& x : states) {
    const auto [elbow, tip] = arm.link_points(x(0), x(1));
    const double d = std::min(segment_distance(Eigen::Vector2d::Zero(), elbow, obstacle.center),
                              segment_distance(elbow, tip, obstacle.center));
    best = std::min(best, d - obstacle.radius);
  }
  return best;
}

nlohmann::json vec_to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec vec_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace corrlearn
