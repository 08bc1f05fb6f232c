#pragma once

#include <string>

#include <json.hpp>

#include "corrlearn/coactive.hpp"
#include "corrlearn/learner.hpp"

namespace corrlearn {

nlohmann::json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

/// Full run record: per-iteration theta, trajectory, cuts and diagnostics.
nlohmann::json to_json(const RunHistory& run);
RunHistory run_history_from_json(const nlohmann::json& j);

struct CsvOptions {
  bool include_wall_time = true;  // false writes 0 so reruns are byte-identical
};

/// Columns: k, e_theta, vol_estimate, t_k, correction_dir, wall_ms.
/// Several corrections in one iteration are separated by '|'; direction
/// entries are joined by ';'. Missing values are left empty.
std::string convergence_csv(const RunHistory& run, const CsvOptions& opts = {});
std::string convergence_csv(const CoactiveHistory& run);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace corrlearn
