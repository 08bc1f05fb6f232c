#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrlearn/dynamics.hpp"
#include "corrlearn/objective.hpp"
#include "corrlearn/polytope.hpp"

namespace corrlearn {

/// Disc in the arm's workspace plane.
struct CircleObstacle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // m
  double radius = 0.0;                               // m
};

/// Square gate in a vertical plane; used for rendering only.
struct Gate {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // m
  double width = 0.0;                                // m
  double yaw = 0.0;                                  // rad, plane normal heading
};

/// Everything needed to run the learner on one problem.
struct TaskPreset {
  std::string name;
  SystemPtr system;
  CostPtr cost;
  Vec x0;
  int horizon = 0;
  BoxBounds initial_box;
  std::optional<Vec> theta_star;  // simulated-human weights, when defined
  std::optional<CircleObstacle> obstacle;
  std::optional<Gate> gate;

  SearchSpace initial_space() const { return SearchSpace::from_box(initial_box); }
};

/// "pendulum", "arm", "arm_game", "quadrotor_game".
TaskPreset make_task(const std::string& name);
std::vector<std::string> task_names();

/// Builds a task from a JSON document. Recognized keys:
///   task      preset to start from (required)
///   dt, horizon, x0, theta_star
///   params    physical parameters of the system (names as in the *Params structs)
///   bounds    {"lower": [...], "upper": [...]}
///   obstacle  {"center": [x, y], "radius": r}
///   gate      {"center": [x, y, z], "width": w, "yaw": psi}
TaskPreset task_from_json(const nlohmann::json& j);
TaskPreset load_task_file(const std::string& path);

/// Smallest distance from the obstacle's boundary to either arm link over
/// the states of the trajectory; negative means a collision.
double arm_clearance(const TwoLinkArm& arm, const CircleObstacle& obstacle,
                     const std::vector<Vec>& states);

nlohmann::json vec_to_json(const Vec& v);
Vec vec_from_json(const nlohmann::json& j);

}  // namespace corrlearn
