#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "experiment.hpp"

namespace corrlearn {

inline constexpr int kProtocolVersion = 1;

// One answered proposal, enough to replay the session through the library.
struct SessionEvent {
  std::uint64_t proposal = 0;
  std::size_t chosen = 0;
  Feedback feedback;
};

nlohmann::json event_to_json(const SessionEvent& event);
SessionEvent event_from_json(const nlohmann::json& doc);

// Human-in-the-loop learning session. Not thread-safe; owned by one loop.
// The latent loss column of the log is measured against the config's teacher.
class TeachSession {
 public:
  TeachSession(ExperimentConfig config, std::shared_ptr<const Map> map, std::string id);

  const std::string& id() const { return id_; }
  const ExperimentConfig& config() const { return config_; }
  bool awaiting() const { return pending_.has_value(); }
  std::uint64_t pending_proposal() const;
  const Weights& weights() const { return weights_; }
  const TrialLog& log() const { return log_; }
  std::span<const SessionEvent> events() const { return events_; }

  // Proposal body: pose, path window, candidates, scores, chosen index and a
  // random alternative for preference queries. Throws kProtocol if a
  // proposal is already pending.
  nlohmann::json propose();

  // Applies one feedback to the pending proposal and executes the chosen
  // action. Stale ids throw kProtocol, malformed payloads kParse; neither
  // changes state.
  nlohmann::json submit(std::uint64_t proposal, const nlohmann::json& feedback);

  nlohmann::json export_json() const;

 private:
  struct Pending {
    std::uint64_t id;
    Observation obs;
    std::size_t chosen;
  };

  ExperimentConfig config_;
  std::shared_ptr<const Map> map_;
  std::string id_;
  Rng rng_;
  WorldState state_;
  Weights weights_;
  TrialLog log_;
  std::vector<SessionEvent> events_;
  std::optional<Pending> pending_;
  std::uint64_t next_proposal_ = 1;
};

// Re-runs recorded events from the start pose with the pure library
// functions. Throws kValidation if an event's chosen index disagrees with the
// replayed policy.
TrialLog replay_session(const ExperimentConfig& config, const Map& map,
                        std::span<const SessionEvent> events);

using ConnectionId = std::uint64_t;
using MessageSink = std::function<void(ConnectionId, std::string)>;

// Single-session message loop. Transports push inbound text with post() and
// receive replies through the sink, which is called from the loop thread.
class TeachService {
 public:
  TeachService(ExperimentConfig config, MessageSink sink);
  ~TeachService();

  TeachService(const TeachService&) = delete;
  TeachService& operator=(const TeachService&) = delete;

  void post(ConnectionId connection, std::string text);
  void disconnected(ConnectionId connection);
  void stop();

  // Number of sessions started so far.
  std::uint64_t sessions_started() const;

 private:
  struct Inbound {
    ConnectionId connection;
    std::optional<std::string> text;  // nullopt: connection closed
  };

  void run();
  void handle(ConnectionId connection, const std::string& text);
  void on_hello(ConnectionId connection, const nlohmann::json& msg);
  void on_feedback(ConnectionId connection, const nlohmann::json& msg);
  void auto_advance();
  void send(ConnectionId connection, nlohmann::json body);
  void send_error(ConnectionId connection, const std::string& code, const std::string& message,
                  const nlohmann::json& ref);
  void emit_proposal();
  void close_session();

  ExperimentConfig config_;
  MessageSink sink_;

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::deque<Inbound> queue_;
  bool stopping_ = false;
  std::uint64_t sessions_started_ = 0;

  // Loop-thread state.
  std::unique_ptr<TeachSession> session_;
  ConnectionId owner_ = 0;
  SessionMode mode_ = SessionMode::kStepper;
  std::chrono::milliseconds advance_after_{1000};
  std::chrono::steady_clock::time_point deadline_;
  std::map<ConnectionId, std::uint64_t> out_seq_;
  std::map<ConnectionId, std::uint64_t> in_seq_;

  std::thread loop_;
};

}  // namespace corrlearn
