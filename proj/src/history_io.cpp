#include "corrlearn/history_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace corrlearn {

namespace {

using nlohmann::json;

json vectors_to_json(const std::vector<Vec>& vs) {
  json out = json::array();
  for (const Vec& v : vs) out.push_back(vec_to_json(v));
  return out;
}

std::vector<Vec> vectors_from_json(const json& j) {
  std::vector<Vec> out;
  for (const auto& v : j) out.push_back(vec_from_json(v));
  return out;
}

std::string number(double v) { return fmt::format("{:.10g}", v); }

std::string join_direction(const Vec& a) {
  std::string s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += (i ? ";" : "") + number(a(i));
  return s;
}

void correction_columns(const std::vector<Correction>& cs, std::string& times, std::string& dirs) {
  for (size_t i = 0; i < cs.size(); ++i) {
    times += (i ? "|" : "") + std::to_string(cs[i].time);
    dirs += (i ? "|" : "") + join_direction(cs[i].direction);
  }
}

}  // namespace

json to_json(const Trajectory& traj) {
  return {{"states", vectors_to_json(traj.states)}, {"controls", vectors_to_json(traj.controls)}};
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t{vectors_from_json(j.at("states")), vectors_from_json(j.at("controls"))};
  if (t.states.size() != t.controls.size() + 1) {
    throw DimensionError("trajectory: expected one more state than controls");
  }
  return t;
}

json to_json(const RunHistory& run) {
  json iterations = json::array();
  for (const auto& rec : run.iterations) {
    json cuts = json::array();
    for (const auto& c : rec.cuts) {
      json cut = {{"t_k", c.correction.time},
                  {"direction", vec_to_json(c.correction.direction)},
                  {"normal", vec_to_json(c.halfspace.normal)},
                  {"offset", c.halfspace.offset},
                  {"residual", c.residual}};
      if (c.star_value) cut["star_value"] = *c.star_value;
      cuts.push_back(std::move(cut));
    }
    json it = {{"k", rec.k},
               {"theta", vec_to_json(rec.theta)},
               {"plan_gradient_norm", rec.plan_gradient_norm},
               {"trajectory", to_json(rec.trajectory)},
               {"cuts", std::move(cuts)},
               {"wall_ms", rec.wall_ms}};
    if (rec.error) it["e_theta"] = *rec.error;
    if (rec.volume) {
      it["volume"] = {{"estimate", rec.volume->volume},
                      {"std_error", rec.volume->std_error},
                      {"samples", rec.volume->samples},
                      {"accepted", rec.volume->accepted}};
    }
    iterations.push_back(std::move(it));
  }
  json out = {{"task", run.task},
              {"stop_reason", run.stop_reason},
              {"message", run.message},
              {"iteration_bound", run.iteration_bound},
              {"final_theta", vec_to_json(run.final_theta)},
              {"final_space", to_json(run.final_space)},
              {"iterations", std::move(iterations)}};
  if (run.theta_star) out["theta_star"] = vec_to_json(*run.theta_star);
  return out;
}

RunHistory run_history_from_json(const json& j) {
  RunHistory run;
  run.task = j.at("task").get<std::string>();
  run.stop_reason = j.at("stop_reason").get<std::string>();
  run.message = j.value("message", std::string());
  run.iteration_bound = j.at("iteration_bound").get<int>();
  run.final_theta = vec_from_json(j.at("final_theta"));
  run.final_space = search_space_from_json(j.at("final_space"));
  if (j.contains("theta_star")) run.theta_star = vec_from_json(j.at("theta_star"));
  for (const auto& it : j.at("iterations")) {
    IterationRecord rec;
    rec.k = it.at("k").get<int>();
    rec.theta = vec_from_json(it.at("theta"));
    rec.plan_gradient_norm = it.value("plan_gradient_norm", 0.0);
    rec.trajectory = trajectory_from_json(it.at("trajectory"));
    rec.wall_ms = it.value("wall_ms", 0.0);
    if (it.contains("e_theta")) rec.error = it.at("e_theta").get<double>();
    if (it.contains("volume")) {
      const auto& v = it.at("volume");
      rec.volume = VolumeEstimate{v.at("estimate").get<double>(), v.at("std_error").get<double>(),
                                  v.at("samples").get<size_t>(), v.at("accepted").get<size_t>()};
    }
    for (const auto& c : it.at("cuts")) {
      CutRecord cut;
      cut.correction = {vec_from_json(c.at("direction")), c.at("t_k").get<int>()};
      cut.halfspace = {vec_from_json(c.at("normal")), c.at("offset").get<double>()};
      cut.residual = c.value("residual", 0.0);
      if (c.contains("star_value")) cut.star_value = c.at("star_value").get<double>();
      rec.cuts.push_back(std::move(cut));
    }
    run.iterations.push_back(std::move(rec));
  }
  return run;
}

std::string convergence_csv(const RunHistory& run, const CsvOptions& opts) {
  std::ostringstream os;
  os << "k,e_theta,vol_estimate,t_k,correction_dir,wall_ms\n";
  for (const auto& rec : run.iterations) {
    std::vector<Correction> cs;
    for (const auto& c : rec.cuts) cs.push_back(c.correction);
    std::string times, dirs;
    correction_columns(cs, times, dirs);
    os << rec.k << ',' << (rec.error ? number(*rec.error) : "") << ','
       << (rec.volume ? number(rec.volume->volume) : "") << ',' << times << ',' << dirs << ','
       << (opts.include_wall_time ? fmt::format("{:.3f}", rec.wall_ms) : "0") << '\n';
  }
  return os.str();
}

std::string convergence_csv(const CoactiveHistory& run) {
  std::ostringstream os;
  os << "k,e_theta,vol_estimate,t_k,correction_dir,wall_ms\n";
  for (const auto& rec : run.iterations) {
    std::string times, dirs;
    correction_columns(rec.corrections, times, dirs);
    os << rec.k << ',' << (rec.error ? number(*rec.error) : "") << ",," << times << ',' << dirs << ",0\n";
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace corrlearn
