#include "ws_server.hpp"

#include <chrono>
#include <deque>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

namespace corrlearn {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, const ServerOptions& options)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        session_(options.game, options.factory) {}

  void run() {
    asio::dispatch(ws_.get_executor(), [self = shared_from_this()] {
      self->ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      self->ws_.async_accept([self](beast::error_code ec) { self->on_accept(ec); });
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      spdlog::warn("websocket handshake failed: {}", ec.message());
      return;
    }
    spdlog::info("client connected");
    read();
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      if (ec != websocket::error::closed) spdlog::debug("read ended: {}", ec.message());
      closed_ = true;
      timer_.cancel();
      spdlog::info("client disconnected; session discarded");
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    send(session_.handle_text(text));
    schedule_tick();
    read();
  }

  void schedule_tick() {
    if (closed_ || ticking_ || !session_.playing()) return;
    ticking_ = true;
    timer_.expires_after(std::chrono::microseconds(static_cast<long>(session_.frame_interval_ms() * 1000.0)));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      self->ticking_ = false;
      if (ec || self->closed_) return;
      self->send(self->session_.tick());
      self->schedule_tick();
    });
  }

  void send(Session::Messages messages) {
    for (auto& m : messages) outbox_.push_back(m.dump());
    if (!writing_) write_next();
  }

  void write_next() {
    if (outbox_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->outbox_.pop_front();
      if (ec) {
        self->closed_ = true;
        self->writing_ = false;
        return;
      }
      self->write_next();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  Session session_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool ticking_ = false;
  bool closed_ = false;
};

}  // namespace

struct GameServer::Impl {
  explicit Impl(ServerOptions opts) : options(std::move(opts)), acceptor(io) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != asio::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
        return;
      }
      std::make_shared<Connection>(std::move(socket), options)->run();
      accept();
    });
  }

  ServerOptions options;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::vector<std::thread> workers;
  std::unique_ptr<asio::executor_work_guard<asio::io_context::executor_type>> guard;
  std::uint16_t bound_port = 0;
};

GameServer::GameServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

GameServer::~GameServer() {
  stop();
  wait();
}

void GameServer::start() {
  const tcp::endpoint endpoint(asio::ip::make_address(impl_->options.address), impl_->options.port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen(asio::socket_base::max_listen_connections);
  impl_->bound_port = impl_->acceptor.local_endpoint().port();
  impl_->guard = std::make_unique<asio::executor_work_guard<asio::io_context::executor_type>>(
      impl_->io.get_executor());
  impl_->accept();
  const int n = std::max(1, impl_->options.threads);
  for (int i = 0; i < n; ++i) impl_->workers.emplace_back([this] { impl_->io.run(); });
  spdlog::info("game server listening on ws://{}:{}", impl_->options.address, port());
}

void GameServer::wait() {
  for (auto& w : impl_->workers) {
    if (w.joinable()) w.join();
  }
  impl_->workers.clear();
}

void GameServer::stop() {
  asio::post(impl_->io, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
  });
  impl_->guard.reset();
  impl_->io.stop();
}

std::uint16_t GameServer::port() const { return impl_->bound_port; }

}  // namespace corrlearn
