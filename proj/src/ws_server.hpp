#pragma once

#include <cstdint>
#include <memory>

#include "experiment.hpp"

namespace corrlearn {

// Websocket front end for TeachService. Listens on 127.0.0.1; port 0 picks a
// free port.
class WebSocketServer {
 public:
  WebSocketServer(ExperimentConfig config, std::uint16_t port);
  ~WebSocketServer();

  WebSocketServer(const WebSocketServer&) = delete;
  WebSocketServer& operator=(const WebSocketServer&) = delete;

  std::uint16_t port() const;

  // Serves on a background thread until stop().
  void start();
  // Serves on the calling thread until stop() is called from elsewhere.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace corrlearn
