#include "ws_server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <future>
#include <functional>
#include <map>
#include <string>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "error.hpp"
#include "teach.hpp"

namespace corrlearn {

namespace beast = boost::beast;
namespace net = boost::asio;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  using Closed = std::function<void(ConnectionId)>;

  Connection(tcp::socket socket, ConnectionId id, TeachService& service, Closed closed)
      : ws_(std::move(socket)), id_(id), service_(service), closed_(std::move(closed)) {}

  void start() {
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->finish();
      self->read();
    });
  }

  void shutdown() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

  void send(std::string text) {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      self->service_.post(self->id_, beast::buffers_to_string(self->buffer_.data()));
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) return;
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write();
                    });
  }

  void finish() {
    if (done_) return;
    done_ = true;
    service_.disconnected(id_);
    closed_(id_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  ConnectionId id_;
  TeachService& service_;
  Closed closed_;
  bool done_ = false;
};

}  // namespace

struct WebSocketServer::Impl {
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::map<ConnectionId, std::weak_ptr<Connection>> connections;  // io thread only
  ConnectionId next_id = 1;
  std::unique_ptr<TeachService> service;
  std::thread thread;
  std::uint16_t port = 0;
  std::atomic<bool> running{false};
  bool stopped = false;

  void close_all() {
    beast::error_code ec;
    acceptor.close(ec);
    for (auto& [id, weak] : connections)
      if (auto conn = weak.lock()) conn->shutdown();
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      const ConnectionId id = next_id++;
      auto conn = std::make_shared<Connection>(std::move(socket), id, *service,
                                               [this](ConnectionId gone) {
                                                 connections.erase(gone);
                                               });
      connections[id] = conn;
      conn->start();
      accept();
    });
  }

  void deliver(ConnectionId id, std::string text) {
    net::post(ioc, [this, id, text = std::move(text)]() mutable {
      const auto it = connections.find(id);
      if (it == connections.end()) return;
      if (auto conn = it->second.lock()) conn->send(std::move(text));
    });
  }
};

WebSocketServer::WebSocketServer(ExperimentConfig config, std::uint16_t port)
    : impl_(std::make_unique<Impl>()) {
  // Fail fast on a bad map instead of on the first hello.
  load_map_file(config.map_path);
  impl_->service = std::make_unique<TeachService>(
      std::move(config),
      [impl = impl_.get()](ConnectionId id, std::string text) { impl->deliver(id, std::move(text)); });
  try {
    const tcp::endpoint endpoint(net::ip::make_address("127.0.0.1"), port);
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen();
    impl_->port = impl_->acceptor.local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorKind::kIo, "cannot listen on port " + std::to_string(port) + ": " +
                                    e.what());
  }
  impl_->accept();
}

WebSocketServer::~WebSocketServer() { stop(); }

std::uint16_t WebSocketServer::port() const { return impl_->port; }

void WebSocketServer::start() {
  impl_->running = true;
  impl_->thread = std::thread([impl = impl_.get()] { impl->ioc.run(); });
}

void WebSocketServer::run() {
  impl_->running = true;
  impl_->ioc.run();
}

void WebSocketServer::stop() {
  if (impl_->stopped) return;
  impl_->stopped = true;
  if (impl_->service) impl_->service->stop();
  // Close sockets on the io thread so clients see the connection drop
  // instead of hanging on a silent peer.
  if (impl_->running) {
    auto done = std::make_shared<std::promise<void>>();
    auto closed = done->get_future();
    net::post(impl_->ioc, [impl = impl_.get(), done] {
      impl->close_all();
      done->set_value();
    });
    closed.wait_for(std::chrono::seconds(2));
  } else {
    impl_->close_all();
  }
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace corrlearn
