#include "corrlearn/game.hpp"

#include <map>
#include <set>

#include <spdlog/spdlog.h>

namespace corrlearn {

using nlohmann::json;

namespace {

using KeyTable = std::vector<std::pair<std::string, std::vector<double>>>;

const KeyTable& key_table(const std::string& game) {
  static const KeyTable arm = {
      {"up", {1, 0}}, {"down", {-1, 0}}, {"left", {0, 1}}, {"right", {0, -1}}};
  static const KeyTable quadrotor = {
      {"up", {1, 1, 1, 1}}, {"down", {-1, -1, -1, -1}}, {"w", {0, 1, 0, -1}},
      {"s", {0, -1, 0, 1}}, {"a", {1, 0, -1, 0}},      {"d", {-1, 0, 1, 0}}};
  if (game == "arm_game") return arm;
  if (game == "quadrotor_game") return quadrotor;
  throw Error("unknown game '" + game + "' (expected arm_game or quadrotor_game)");
}

json error_message(const std::string& text) { return {{"type", "error"}, {"message", text}}; }

bool is_number_array(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& v : j) {
    if (!v.is_number()) return false;
  }
  return true;
}

bool is_count(const json& j) { return j.is_number_integer() && j.get<long long>() >= 0; }

std::string check_fields(const json& m, const std::set<std::string>& required,
                         const std::set<std::string>& optional) {
  for (const auto& name : required) {
    if (!m.contains(name)) return "missing field '" + name + "'";
  }
  for (const auto& [name, value] : m.items()) {
    if (name != "type" && !required.count(name) && !optional.count(name)) {
      return "unexpected field '" + name + "'";
    }
  }
  return {};
}

}  // namespace

std::vector<std::string> game_keys(const std::string& game) {
  std::vector<std::string> keys;
  for (const auto& [name, dir] : key_table(game)) keys.push_back(name);
  return keys;
}

std::optional<Correction> map_keys_to_correction(const std::string& game,
                                                 const std::vector<std::string>& keys, int t) {
  const KeyTable& table = key_table(game);
  if (keys.empty()) return std::nullopt;
  Vec a = Vec::Zero(static_cast<Eigen::Index>(table.front().second.size()));
  std::set<std::string> seen;
  for (const auto& key : keys) {
    if (!seen.insert(key).second) continue;
    bool found = false;
    for (const auto& [name, dir] : table) {
      if (name != key) continue;
      a += Eigen::Map<const Vec>(dir.data(), static_cast<Eigen::Index>(dir.size()));
      found = true;
    }
    if (!found) return std::nullopt;
  }
  if (a.isZero(0.0)) return std::nullopt;
  return Correction{a, t};
}

std::string to_string(Session::Phase phase) {
  switch (phase) {
    case Session::Phase::idle: return "idle";
    case Session::Phase::planning: return "planning";
    case Session::Phase::playing: return "playing";
    case Session::Phase::awaiting_confirmation: return "awaiting_confirmation";
    case Session::Phase::done: return "done";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

Session::Session(GameOptions options, TaskFactory factory)
    : options_(std::move(options)), factory_(std::move(factory)) {
  if (!(options_.playback_rate > 0.0)) throw Error("playback rate must be positive");
}

Session::Messages Session::handle_text(const std::string& text) {
  json message;
  try {
    message = json::parse(text);
  } catch (const json::parse_error& e) {
    return {error_message(std::string("malformed JSON: ") + e.what())};
  }
  return handle(message);
}

Session::Messages Session::handle(const json& message) {
  const std::string problem = validate_inbound(message);
  if (!problem.empty()) return {error_message("invalid message: " + problem)};
  const std::string type = message.at("type");
  if (type == "start") return start(message);
  if (type == "key") return key(message);
  if (type == "confirm") {
    if (!learner_ || phase_ == Phase::done) return {error_message("no game in progress")};
    return finish("confirmed");
  }
  // reset
  learner_.reset();
  pending_.clear();
  cursor_ = 0;
  phase_ = Phase::idle;
  game_.clear();
  return {};
}

Session::Messages Session::start(const json& message) {
  learner_.reset();
  pending_.clear();
  cursor_ = 0;
  phase_ = Phase::idle;
  const std::string game = message.at("game");
  TaskPreset task;
  try {
    key_table(game);
    task = factory_(game);
  } catch (const Error& e) {
    return {error_message(e.what())};
  }
  LearnerConfig config;
  config.center = CenterStrategy::mve;
  config.seed = message.value("seed", std::uint64_t{0});
  config.plan = options_.plan;
  config.iteration_limit = options_.iteration_limit;
  game_ = game;
  learner_.emplace(std::move(task), std::move(config));
  spdlog::info("session: started {} (iteration limit {})", game_, learner_->iteration_bound());
  return begin_playback(true);
}

Session::Messages Session::key(const json& message) {
  if (phase_ != Phase::playing) return {error_message("key received while no playback is in progress")};
  const int t = message.at("t");
  const int T = learner_->task().horizon;
  if (t < 0 || t > T) {
    return {error_message("key time step " + std::to_string(t) + " outside [0, " + std::to_string(T) + "]")};
  }
  const auto keys = message.at("keys").get<std::vector<std::string>>();
  if (auto corr = map_keys_to_correction(game_, keys, t)) {
    pending_.push_back(std::move(*corr));
  } else {
    spdlog::debug("session: ignoring key set without a direction at t={}", t);
  }
  return {};
}

Session::Messages Session::tick() {
  if (phase_ != Phase::playing) return {};
  const IterationRecord& rec = learner_->records().back();
  const auto& states = rec.trajectory.states;
  if (cursor_ < static_cast<int>(states.size())) {
    json frame = {{"type", "frame"}, {"t", cursor_}, {"state", vec_to_json(states[cursor_])}};
    ++cursor_;
    return {std::move(frame)};
  }

  phase_ = Phase::planning;
  Messages out;
  const int k = rec.k;
  try {
    learner_->apply_corrections(pending_);
  } catch (const InfeasibleError& e) {
    pending_.clear();
    Messages done = finish("infeasible");
    done.front()["message"] = e.what();
    return done;
  }
  const int cuts = static_cast<int>(pending_.size());
  pending_.clear();
  out.push_back({{"type", "iteration_done"}, {"k", k}, {"cuts", cuts}});
  if (k >= learner_->iteration_bound()) {
    for (auto& m : finish("iteration_limit")) out.push_back(std::move(m));
    return out;
  }
  for (auto& m : begin_playback(cuts > 0)) out.push_back(std::move(m));
  return out;
}

Session::Messages Session::begin_playback(bool replan) {
  phase_ = Phase::planning;
  try {
    if (replan) {
      learner_->plan_iteration();
    } else {
      learner_->repeat_iteration();
    }
  } catch (const Error& e) {
    spdlog::error("session: planning failed: {}", e.what());
    Messages out{error_message(std::string("planning failed: ") + e.what())};
    phase_ = Phase::done;
    json done = {{"type", "done"}, {"reason", "error"}, {"message", e.what()}};
    const auto& recs = learner_->records();
    done["theta"] = recs.empty() ? json::array() : vec_to_json(recs.back().theta);
    out.push_back(std::move(done));
    return out;
  }
  cursor_ = 0;
  phase_ = Phase::playing;
  return {plan_message()};
}

Session::Messages Session::finish(const std::string& reason) {
  phase_ = Phase::done;
  const auto& recs = learner_->records();
  json done = {{"type", "done"}, {"reason", reason}};
  done["theta"] = recs.empty() ? json::array() : vec_to_json(recs.back().theta);
  done["k"] = learner_->k();
  spdlog::info("session: {} finished ({}) after {} iterations", game_, reason, learner_->k());
  return {std::move(done)};
}

json Session::plan_message() const {
  const TaskPreset& task = learner_->task();
  const IterationRecord& rec = learner_->records().back();
  json m = {{"type", "plan"}, {"k", rec.k}, {"theta", vec_to_json(rec.theta)}};
  m["game"] = game_;
  m["horizon"] = task.horizon;
  m["dt"] = task.system->time_step();
  m["frame_interval_ms"] = frame_interval_ms();
  if (task.obstacle) {
    m["obstacle"] = {{"center", {task.obstacle->center.x(), task.obstacle->center.y()}},
                     {"radius", task.obstacle->radius}};
  }
  if (task.gate) {
    const auto& g = *task.gate;
    m["gate"] = {{"center", {g.center.x(), g.center.y(), g.center.z()}}, {"width", g.width}, {"yaw", g.yaw}};
  }
  return m;
}

// ---------------------------------------------------------------------------

std::string validate_inbound(const json& m) {
  if (!m.is_object()) return "message must be a JSON object";
  if (!m.contains("type") || !m.at("type").is_string()) return "field 'type' must be a string";
  const std::string type = m.at("type");
  if (type == "start") {
    if (auto p = check_fields(m, {"game"}, {"seed"}); !p.empty()) return p;
    if (!m.at("game").is_string()) return "field 'game' must be a string";
    if (m.contains("seed") && !is_count(m.at("seed"))) return "field 'seed' must be a non-negative integer";
    return {};
  }
  if (type == "key") {
    if (auto p = check_fields(m, {"keys", "t"}, {}); !p.empty()) return p;
    const json& keys = m.at("keys");
    if (!keys.is_array()) return "field 'keys' must be an array";
    for (const auto& k : keys) {
      if (!k.is_string()) return "field 'keys' must contain strings";
    }
    if (!m.at("t").is_number_integer()) return "field 't' must be an integer";
    return {};
  }
  if (type == "confirm" || type == "reset") return check_fields(m, {}, {});
  return "unknown message type '" + type + "'";
}

std::string validate_outbound(const json& m) {
  if (!m.is_object()) return "message must be a JSON object";
  if (!m.contains("type") || !m.at("type").is_string()) return "field 'type' must be a string";
  const std::string type = m.at("type");
  if (type == "plan") {
    if (auto p = check_fields(m, {"k", "theta"}, {"game", "horizon", "dt", "frame_interval_ms", "obstacle", "gate"});
        !p.empty()) {
      return p;
    }
    if (!m.at("k").is_number_integer() || m.at("k").get<long long>() < 1) return "field 'k' must be a positive integer";
    if (!is_number_array(m.at("theta"))) return "field 'theta' must be an array of numbers";
    return {};
  }
  if (type == "frame") {
    if (auto p = check_fields(m, {"t", "state"}, {}); !p.empty()) return p;
    if (!is_count(m.at("t"))) return "field 't' must be a non-negative integer";
    if (!is_number_array(m.at("state"))) return "field 'state' must be an array of numbers";
    return {};
  }
  if (type == "iteration_done") {
    if (auto p = check_fields(m, {"k", "cuts"}, {}); !p.empty()) return p;
    if (!m.at("k").is_number_integer() || m.at("k").get<long long>() < 1) return "field 'k' must be a positive integer";
    if (!is_count(m.at("cuts"))) return "field 'cuts' must be a non-negative integer";
    return {};
  }
  if (type == "done") {
    if (auto p = check_fields(m, {"reason", "theta"}, {"k", "message"}); !p.empty()) return p;
    if (!m.at("reason").is_string()) return "field 'reason' must be a string";
    if (!is_number_array(m.at("theta"))) return "field 'theta' must be an array of numbers";
    if (m.contains("message") && !m.at("message").is_string()) return "field 'message' must be a string";
    return {};
  }
  if (type == "error") {
    if (auto p = check_fields(m, {"message"}, {}); !p.empty()) return p;
    if (!m.at("message").is_string()) return "field 'message' must be a string";
    return {};
  }
  return "unknown message type '" + type + "'";
}

}  // namespace corrlearn

namespace corrlearn {

KeyScript arm_game_script() {
  return {{{1, 11, {"left"}}, {2, 16, {"left"}}, {3, 34, {"down"}}}, 4};
}

KeyScript quadrotor_game_script() {
  return {{{1, 8, {"up"}}, {1, 20, {"up"}}, {2, 14, {"down"}}, {4, 13, {"s"}}, {5, 19, {"s"}}}, 6};
}

ScriptedGame play_key_script(const std::string& game, const KeyScript& script, GameOptions options,
                             TaskFactory factory, std::uint64_t seed) {
  Session session(std::move(options), std::move(factory));
  ScriptedGame out;
  auto record = [&](Session::Messages msgs) {
    for (auto& m : msgs) {
      if (m.at("type") == "done") out.reason = m.at("reason").get<std::string>();
      out.transcript.push_back(std::move(m));
    }
  };
  record(session.handle({{"type", "start"}, {"game", game}, {"seed", seed}}));
  while (session.playing()) {
    const IterationRecord& rec = session.learner()->records().back();
    const int frames = static_cast<int>(rec.trajectory.states.size());
    for (const KeyPress& p : script.presses) {
      if (p.k == rec.k && p.t == session.cursor()) {
        record(session.handle({{"type", "key"}, {"keys", p.keys}, {"t", p.t}}));
      }
    }
    if (session.cursor() == frames && script.confirm_after > 0 && rec.k >= script.confirm_after) {
      record(session.handle({{"type", "confirm"}}));
      break;
    }
    record(session.tick());
  }
  if (const Learner* learner = session.learner()) {
    out.history = make_history(*learner, out.reason);
  }
  return out;
}

}  // namespace corrlearn
