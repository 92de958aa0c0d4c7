#include "teach.hpp"

#include <chrono>
#include <cstdio>
#include <random>

#include "error.hpp"

namespace corrlearn {
namespace {

constexpr double kPathWindowMeters = 5.0;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string error_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kBusy: return "busy";
    case ErrorKind::kProtocol: return "protocol";
  }
  return "internal";
}

nlohmann::json point_json(Point p) { return nlohmann::json::array({p.x, p.y}); }

// Shared by live sessions and replay so both produce identical logs.
std::optional<UpdateResult> advance(const ExperimentConfig& config, const Map& map,
                                    WorldState& state, Weights& w, TrialLog& log,
                                    const Observation& obs, std::size_t chosen,
                                    const Feedback& feedback) {
  auto update = apply_feedback(w, obs, chosen, feedback, config.eta, config.scales);
  const LatentEval latent = latent_eval(config.teacher, obs.features, obs.selectable);
  StepRecord rec;
  rec.t = log.steps.size();
  rec.chosen_index = chosen;
  rec.latent_loss = latent.loss_of(chosen);
  rec.feedback_kind = kind_of(feedback);
  if (update) {
    w = update->weights;
    ++log.update_count;
    rec.corrected = true;
    rec.pseudo_regret_increment = update->pseudo_regret_increment;
    log.gaps.push_back({rec.latent_loss - latent.loss_of(update->pseudo_best),
                        rec.latent_loss - latent.loss_of(latent.best_index)});
  }
  const WorldState next = step(map, state, obs.actions[chosen], config.actions);
  rec.reset = next.reset_count != state.reset_count || next.lap_count != state.lap_count;
  append_record(log, rec, w);
  state = next;
  return update;
}

std::uint64_t required_uint(const nlohmann::json& msg, const char* key) {
  const auto it = msg.find(key);
  if (it == msg.end() || !it->is_number_unsigned())
    throw Error(ErrorKind::kProtocol, std::string("message field '") + key +
                                          "' must be a non-negative integer");
  return it->get<std::uint64_t>();
}

}  // namespace

nlohmann::json event_to_json(const SessionEvent& event) {
  return {{"proposal", event.proposal},
          {"chosen", event.chosen},
          {"feedback", feedback_to_json(event.feedback)}};
}

SessionEvent event_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "event must be an object");
  SessionEvent ev;
  try {
    ev.proposal = doc.at("proposal").get<std::uint64_t>();
    ev.chosen = doc.at("chosen").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("event: ") + e.what());
  }
  if (!doc.contains("feedback")) throw Error(ErrorKind::kParse, "event: missing 'feedback'");
  ev.feedback = feedback_from_json(doc.at("feedback"));
  return ev;
}

TeachSession::TeachSession(ExperimentConfig config, std::shared_ptr<const Map> map,
                           std::string id)
    : config_(std::move(config)),
      map_(std::move(map)),
      id_(std::move(id)),
      rng_(make_trial_rng(config_, config_.seed)),
      state_(initial_state(*map_)) {
  if (mask_colliding(*map_, generate_action_set(state_.pose, config_.actions)).empty())
    throw Error(ErrorKind::kValidation, "map: every action from the start pose collides");
  log_.config_hash = config_hash(config_);
  log_.trial_seed = config_.seed;
}

std::uint64_t TeachSession::pending_proposal() const {
  if (!pending_) throw Error(ErrorKind::kProtocol, "no proposal is pending");
  return pending_->id;
}

nlohmann::json TeachSession::propose() {
  if (pending_) throw Error(ErrorKind::kProtocol, "a proposal is already awaiting feedback");
  Observation obs = observe(*map_, state_, config_.actions, config_.clip);
  const std::size_t chosen = select_action(weights_, obs.features, obs.selectable);

  std::optional<std::size_t> alternative;
  if (obs.selectable.size() >= 2) {
    std::uniform_int_distribution<std::size_t> pick(0, obs.selectable.size() - 2);
    std::size_t slot = pick(rng_);
    if (obs.selectable[slot] >= chosen) ++slot;
    alternative = obs.selectable[slot];
  }

  std::vector<bool> blocked(obs.actions.size(), true);
  for (std::size_t i : obs.selectable) blocked[i] = false;

  nlohmann::json candidates = nlohmann::json::array();
  for (std::size_t i = 0; i < obs.actions.size(); ++i) {
    const Trajectory& traj = obs.actions[i];
    nlohmann::json points = nlohmann::json::array({point_json({traj.origin.x, traj.origin.y})});
    for (const Pose& s : traj.samples) points.push_back(point_json({s.x, s.y}));
    candidates.push_back({{"index", i},
                          {"curvature", traj.curvature},
                          {"points", std::move(points)},
                          {"features", obs.features[i]},
                          {"score", score(weights_, obs.features[i])},
                          {"blocked", static_cast<bool>(blocked[i])}});
  }

  nlohmann::json window = nlohmann::json::array();
  const auto& path = map_->path();
  const auto& arc = map_->path_arclength();
  const std::size_t first = state_.path_cursor > 0 ? state_.path_cursor - 1 : 0;
  for (std::size_t i = first; i < path.size(); ++i) {
    if (arc[i] - arc[first] > kPathWindowMeters) break;
    window.push_back(point_json(path[i]));
  }

  const std::uint64_t id = next_proposal_++;
  nlohmann::json body = {
      {"proposal", id},
      {"step", log_.steps.size()},
      {"pose", {{"x", state_.pose.x}, {"y", state_.pose.y}, {"heading", state_.pose.heading}}},
      {"path_window", std::move(window)},
      {"candidates", std::move(candidates)},
      {"chosen", chosen},
      {"alternative", alternative ? nlohmann::json(*alternative) : nlohmann::json(nullptr)},
      {"weights", weights_to_json(weights_)},
  };
  pending_ = Pending{id, std::move(obs), chosen};
  return body;
}

nlohmann::json TeachSession::submit(std::uint64_t proposal, const nlohmann::json& feedback_doc) {
  if (!pending_ || pending_->id != proposal)
    throw Error(ErrorKind::kProtocol, "stale or unknown proposal id " + std::to_string(proposal));
  const Feedback feedback = feedback_from_json(feedback_doc);
  validate_feedback(feedback, pending_->obs.actions.size());
  // Dry run so a rejected payload leaves the session untouched.
  apply_feedback(weights_, pending_->obs, pending_->chosen, feedback, config_.eta,
                 config_.scales);

  const Pending pending = std::move(*pending_);
  pending_.reset();
  const auto update = advance(config_, *map_, state_, weights_, log_, pending.obs,
                              pending.chosen, feedback);
  events_.push_back({pending.id, pending.chosen, feedback});
  return {{"proposal", pending.id},
          {"applied", update.has_value()},
          {"feedback_kind", kind_name(kind_of(feedback))},
          {"hinge_loss", update ? nlohmann::json(update->eval.loss) : nlohmann::json(nullptr)},
          {"latent_loss", log_.steps.back().latent_loss},
          {"weights", weights_to_json(weights_)},
          {"digest", hex64(weights_digest(weights_))}};
}

nlohmann::json TeachSession::export_json() const {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : events_) events.push_back(event_to_json(ev));
  nlohmann::json digests = nlohmann::json::array();
  for (std::uint64_t d : log_.weight_digests) digests.push_back(hex64(d));
  return {{"csv", trial_csv(log_.steps)},
          {"events", std::move(events)},
          {"digests", std::move(digests)},
          {"weights", weights_to_json(weights_)},
          {"config_hash", hex64(log_.config_hash)},
          {"steps", log_.steps.size()}};
}

TrialLog replay_session(const ExperimentConfig& config, const Map& map,
                        std::span<const SessionEvent> events) {
  TrialLog log;
  log.config_hash = config_hash(config);
  log.trial_seed = config.seed;
  WorldState state = initial_state(map);
  Weights w;
  for (const SessionEvent& ev : events) {
    const Observation obs = observe(map, state, config.actions, config.clip);
    const std::size_t chosen = select_action(w, obs.features, obs.selectable);
    if (chosen != ev.chosen)
      throw Error(ErrorKind::kValidation,
                  "replay diverged at proposal " + std::to_string(ev.proposal));
    validate_feedback(ev.feedback, obs.actions.size());
    advance(config, map, state, w, log, obs, chosen, ev.feedback);
  }
  return log;
}

TeachService::TeachService(ExperimentConfig config, MessageSink sink)
    : config_(std::move(config)), sink_(std::move(sink)) {
  loop_ = std::thread([this] { run(); });
}

TeachService::~TeachService() { stop(); }

void TeachService::post(ConnectionId connection, std::string text) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back({connection, std::move(text)});
  }
  wake_.notify_one();
}

void TeachService::disconnected(ConnectionId connection) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back({connection, std::nullopt});
  }
  wake_.notify_one();
}

void TeachService::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_one();
  if (loop_.joinable()) loop_.join();
}

std::uint64_t TeachService::sessions_started() const {
  std::lock_guard lock(mutex_);
  return sessions_started_;
}

void TeachService::run() {
  for (;;) {
    std::optional<Inbound> next;
    {
      std::unique_lock lock(mutex_);
      auto ready = [this] { return stopping_ || !queue_.empty(); };
      const bool timed = session_ && mode_ == SessionMode::kTimed && session_->awaiting();
      if (timed) {
        wake_.wait_until(lock, deadline_, ready);
      } else {
        wake_.wait(lock, ready);
      }
      if (stopping_) return;
      if (!queue_.empty()) {
        next = std::move(queue_.front());
        queue_.pop_front();
      }
    }
    if (!next) {
      auto_advance();
      continue;
    }
    if (!next->text) {
      in_seq_.erase(next->connection);
      out_seq_.erase(next->connection);
      if (session_ && owner_ == next->connection) close_session();
      continue;
    }
    handle(next->connection, *next->text);
  }
}

void TeachService::handle(ConnectionId connection, const std::string& text) {
  nlohmann::json msg;
  try {
    msg = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    send_error(connection, "parse", std::string("invalid JSON: ") + e.what(), nullptr);
    return;
  }
  const nlohmann::json ref = msg.is_object() && msg.contains("seq") ? msg["seq"] : nullptr;
  try {
    if (!msg.is_object()) throw Error(ErrorKind::kProtocol, "message must be an object");
    const auto v = msg.find("v");
    if (v == msg.end() || !v->is_number_integer() || v->get<int>() != kProtocolVersion)
      throw Error(ErrorKind::kProtocol, "unsupported protocol version");
    const std::uint64_t seq = required_uint(msg, "seq");
    const auto last = in_seq_.find(connection);
    if (last != in_seq_.end() && seq <= last->second)
      throw Error(ErrorKind::kProtocol, "seq must increase");
    in_seq_[connection] = seq;

    const auto type_it = msg.find("type");
    const std::string type =
        type_it != msg.end() && type_it->is_string() ? type_it->get<std::string>() : "";
    if (type == "hello") {
      on_hello(connection, msg);
      return;
    }
    if (!session_ || owner_ != connection)
      throw Error(ErrorKind::kProtocol, "no session on this connection");
    const auto sid = msg.find("session");
    if (sid == msg.end() || !sid->is_string() || sid->get<std::string>() != session_->id())
      throw Error(ErrorKind::kProtocol, "session id mismatch");
    if (type == "feedback") {
      on_feedback(connection, msg);
    } else if (type == "propose") {
      throw Error(ErrorKind::kProtocol, "a proposal is already awaiting feedback");
    } else if (type == "export") {
      nlohmann::json body = session_->export_json();
      body["type"] = "export";
      send(connection, std::move(body));
    } else if (type == "close") {
      close_session();
      send(connection, {{"type", "ack"}, {"closed", true}});
    } else {
      throw Error(ErrorKind::kProtocol, "unknown message type '" + type + "'");
    }
  } catch (const Error& e) {
    send_error(connection, error_code(e.kind()), e.what(), ref);
  } catch (const std::exception& e) {
    send_error(connection, "internal", e.what(), ref);
  }
}

void TeachService::on_hello(ConnectionId connection, const nlohmann::json& msg) {
  if (session_) throw Error(ErrorKind::kBusy, "a session is already active");
  ExperimentConfig config = config_;
  if (msg.contains("mode")) {
    const std::string mode = msg["mode"].is_string() ? msg["mode"].get<std::string>() : "";
    if (mode == "stepper") {
      config.session_mode = SessionMode::kStepper;
    } else if (mode == "timed") {
      config.session_mode = SessionMode::kTimed;
    } else {
      throw Error(ErrorKind::kProtocol, "mode must be 'stepper' or 'timed'");
    }
  }
  if (msg.contains("auto_advance_ms"))
    config.auto_advance_ms = required_uint(msg, "auto_advance_ms");

  auto map = std::make_shared<const Map>(load_map_file(config.map_path));
  const nlohmann::json map_doc = map_to_json(*map);
  std::uint64_t number;
  {
    std::lock_guard lock(mutex_);
    number = ++sessions_started_;
  }
  session_ = std::make_unique<TeachSession>(config, std::move(map),
                                            "s" + std::to_string(number));
  owner_ = connection;
  mode_ = config.session_mode;
  advance_after_ = std::chrono::milliseconds(config.auto_advance_ms);

  send(connection, {{"type", "hello"},
                    {"k", config.actions.k},
                    {"mode", mode_ == SessionMode::kTimed ? "timed" : "stepper"},
                    {"auto_advance_ms", config.auto_advance_ms},
                    {"map", map_doc},
                    {"weights", weights_to_json(session_->weights())}});
  emit_proposal();
}

void TeachService::on_feedback(ConnectionId connection, const nlohmann::json& msg) {
  const std::uint64_t proposal = required_uint(msg, "proposal");
  if (!msg.contains("feedback")) throw Error(ErrorKind::kParse, "missing 'feedback'");
  nlohmann::json ack = session_->submit(proposal, msg["feedback"]);
  ack["type"] = "ack";
  send(connection, std::move(ack));
  emit_proposal();
}

void TeachService::auto_advance() {
  if (!session_ || !session_->awaiting()) return;
  if (std::chrono::steady_clock::now() < deadline_) return;
  nlohmann::json ack =
      session_->submit(session_->pending_proposal(), nlohmann::json{{"kind", "none"}});
  ack["type"] = "ack";
  ack["auto"] = true;
  send(owner_, std::move(ack));
  emit_proposal();
}

void TeachService::emit_proposal() {
  nlohmann::json body = session_->propose();
  body["type"] = "propose";
  deadline_ = std::chrono::steady_clock::now() + advance_after_;
  send(owner_, std::move(body));
}

void TeachService::close_session() {
  session_.reset();
  owner_ = 0;
}

void TeachService::send(ConnectionId connection, nlohmann::json body) {
  body["v"] = kProtocolVersion;
  const bool owner = session_ && connection == owner_;
  body["session"] = owner ? nlohmann::json(session_->id()) : nlohmann::json(nullptr);
  body["seq"] = ++out_seq_[connection];
  sink_(connection, body.dump());
}

void TeachService::send_error(ConnectionId connection, const std::string& code,
                              const std::string& message, const nlohmann::json& ref) {
  nlohmann::json body = {{"type", "error"}, {"code", code}, {"message", message}};
  if (!ref.is_null()) body["ref"] = ref;
  send(connection, std::move(body));
}

}  // namespace corrlearn
