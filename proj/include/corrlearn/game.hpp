#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrlearn/learner.hpp"

namespace corrlearn {

/// Keys a game accepts, in table order.
std::vector<std::string> game_keys(const std::string& game);

/// Sum of the per-key directions at playback step t. Returns nullopt for an
/// empty set, an unknown key, or keys that cancel to zero.
std::optional<Correction> map_keys_to_correction(const std::string& game,
                                                 const std::vector<std::string>& keys, int t);

struct GameOptions {
  double playback_rate = 10.0;  // frames per second
  int iteration_limit = 50;
  PlanOptions plan;
};

using TaskFactory = std::function<TaskPreset(const std::string&)>;

/// One player's game. Transport-agnostic: the caller feeds inbound JSON
/// messages to handle(), calls tick() every frame interval while playing(),
/// and forwards the returned outbound messages in order.
///
/// Inbound:  {type:"start", game, seed?}, {type:"key", keys, t},
///           {type:"confirm"}, {type:"reset"}
/// Outbound: {type:"plan", k, theta, ...}, {type:"frame", t, state},
///           {type:"iteration_done", k, cuts}, {type:"done", reason, theta},
///           {type:"error", message}
class Session {
 public:
  enum class Phase { idle, planning, playing, awaiting_confirmation, done };
  using Messages = std::vector<nlohmann::json>;

  explicit Session(GameOptions options = {}, TaskFactory factory = make_task);

  Messages handle(const nlohmann::json& message);
  Messages handle_text(const std::string& text);

  /// Emits the next frame; after the last frame applies the recorded
  /// corrections, replans and starts the next playback.
  Messages tick();

  Phase phase() const { return phase_; }
  bool playing() const { return phase_ == Phase::playing; }
  double frame_interval_ms() const { return 1000.0 / options_.playback_rate; }
  int cursor() const { return cursor_; }
  const Learner* learner() const { return learner_ ? &*learner_ : nullptr; }
  const std::string& game() const { return game_; }

 private:
  Messages start(const nlohmann::json& message);
  Messages key(const nlohmann::json& message);
  Messages finish(const std::string& reason);
  Messages begin_playback(bool replan);
  nlohmann::json plan_message() const;

  GameOptions options_;
  TaskFactory factory_;
  Phase phase_ = Phase::idle;
  std::string game_;
  std::optional<Learner> learner_;
  std::vector<Correction> pending_;
  int cursor_ = 0;
};

std::string to_string(Session::Phase phase);

struct KeyPress {
  int k = 0;  // iteration whose playback the press belongs to
  int t = 0;  // playback cursor
  std::vector<std::string> keys;
};

/// Timed key presses; the player confirms after watching playback
/// confirm_after (0: never confirms).
struct KeyScript {
  std::vector<KeyPress> presses;
  int confirm_after = 0;
};

/// Reference key sessions for the two games.
KeyScript arm_game_script();
KeyScript quadrotor_game_script();

struct ScriptedGame {
  RunHistory history;
  std::vector<nlohmann::json> transcript;  // every outbound message, in order
  std::string reason;                      // from the final "done" message
};

/// Drives a Session with the script without a transport or real-time waits.
ScriptedGame play_key_script(const std::string& game, const KeyScript& script, GameOptions options = {},
                             TaskFactory factory = make_task, std::uint64_t seed = 0);

/// Structural checks of the wire protocol. Return an empty string when the
/// message conforms, otherwise a description of the first problem.
std::string validate_inbound(const nlohmann::json& message);
std::string validate_outbound(const nlohmann::json& message);

}  // namespace corrlearn
