#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "corrlearn/game.hpp"

namespace corrlearn {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  int threads = 2;
  GameOptions game;
  TaskFactory factory = make_task;
};

/// Websocket front end for game Sessions: one Session per connection, text
/// frames carrying one JSON message each.
class GameServer {
 public:
  explicit GameServer(ServerOptions options);
  ~GameServer();
  GameServer(const GameServer&) = delete;
  GameServer& operator=(const GameServer&) = delete;

  /// Binds and starts the worker threads; returns immediately.
  void start();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();
  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace corrlearn
