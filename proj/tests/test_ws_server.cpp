#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "ws_server.hpp"

namespace corrlearn {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using nlohmann::json;

class Client {
 public:
  explicit Client(std::uint16_t port) : ws_(io_) {
    asio::ip::tcp::resolver resolver(io_);
    asio::connect(beast::get_lowest_layer(ws_), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }
  void send(const json& m) { ws_.write(asio::buffer(m.dump())); }
  void send_text(const std::string& s) { ws_.write(asio::buffer(s)); }
  json receive() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    EXPECT_TRUE(ws_.got_text());
    return json::parse(beast::buffers_to_string(buffer.data()));
  }
  json receive_until(const std::string& type, std::vector<json>* seen = nullptr) {
    for (;;) {
      json m = receive();
      EXPECT_EQ(validate_outbound(m), "") << m.dump();
      if (seen) seen->push_back(m);
      if (m.at("type") == type) return m;
    }
  }
  void close() { ws_.close(websocket::close_code::normal); }

 private:
  asio::io_context io_;
  websocket::stream<asio::ip::tcp::socket> ws_;
};

ServerOptions test_options() {
  ServerOptions o;
  o.port = 0;
  o.game.playback_rate = 500.0;
  o.game.iteration_limit = 5;
  return o;
}

TEST(GameServer, PlaysOneIterationOverWebsocket) {
  GameServer server(test_options());
  server.start();
  Client client(server.port());

  client.send_text("not json");
  EXPECT_EQ(client.receive().at("type"), "error");

  client.send({{"type", "start"}, {"game", "arm_game"}});
  const json plan = client.receive_until("plan");
  EXPECT_EQ(plan.at("k"), 1);

  std::vector<json> seen;
  const json done = client.receive_until("iteration_done", &seen);
  EXPECT_EQ(done.at("k"), 1);
  EXPECT_EQ(done.at("cuts"), 0);
  size_t frames = 0;
  for (const auto& m : seen) frames += m.at("type") == "frame";
  EXPECT_EQ(frames, 52u);

  const json next = client.receive_until("plan");
  EXPECT_EQ(next.at("k"), 2);
  EXPECT_EQ(next.at("theta"), plan.at("theta"));

  client.send({{"type", "confirm"}});
  const json end = client.receive_until("done");
  EXPECT_EQ(end.at("reason"), "confirmed");
  client.close();
  server.stop();
  server.wait();
}

TEST(GameServer, SessionsAreIndependent) {
  GameServer server(test_options());
  server.start();
  Client a(server.port());
  Client b(server.port());
  a.send({{"type", "start"}, {"game", "arm_game"}});
  b.send({{"type", "confirm"}});
  EXPECT_EQ(b.receive().at("type"), "error");
  EXPECT_EQ(a.receive_until("plan").at("k"), 1);
  a.send({{"type", "reset"}});
  a.close();
  b.close();
}

}  // namespace
}  // namespace corrlearn
