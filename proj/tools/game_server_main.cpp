#include <csignal>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <spdlog/spdlog.h>

#include "corrlearn/logging.hpp"
#include "ws_server.hpp"

int main(int argc, char** argv) {
  using namespace corrlearn;
  init_logging();

  CLI::App app{"Websocket server for the arm and quadrotor correction games"};
  ServerOptions opts;
  std::string config_dir;
  app.add_option("--address", opts.address, "Listen address")->capture_default_str();
  app.add_option("--port", opts.port, "Listen port (0 picks a free one)")->capture_default_str();
  app.add_option("--threads", opts.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--rate", opts.game.playback_rate, "Playback rate in frames per second")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iters", opts.game.iteration_limit,
                 "Iteration limit per game (0 uses the theoretical bound)")
      ->capture_default_str();
  app.add_option("--config-dir", config_dir,
                 "Directory with <game>.json task files; presets are used for missing files")
      ->check(CLI::ExistingDirectory);
  CLI11_PARSE(app, argc, argv);

  if (!config_dir.empty()) {
    opts.factory = [config_dir](const std::string& name) {
      const auto path = std::filesystem::path(config_dir) / (name + ".json");
      if (std::filesystem::exists(path)) return load_task_file(path.string());
      return make_task(name);
    };
  }

  try {
    GameServer server(opts);
    server.start();
    std::cout << "listening on ws://" << opts.address << ":" << server.port() << std::endl;

    boost::asio::io_context signals_io;
    boost::asio::signal_set signals(signals_io, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int sig) {
      spdlog::info("signal {} received, shutting down", sig);
      server.stop();
    });
    signals_io.run();
    server.wait();
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
