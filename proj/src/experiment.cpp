#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace corrlearn {
namespace {

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

[[noreturn]] void config_error(const std::string& why) {
  throw Error(ErrorKind::kValidation, "config: " + why);
}

template <class T>
T field(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  if constexpr (std::is_unsigned_v<T>) {
    if (!doc.at(key).is_number_unsigned())
      throw Error(ErrorKind::kParse,
                  std::string("config: field '") + key + "' must be a non-negative integer");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kParse, std::string("config: field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const nlohmann::json& doc, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw Error(ErrorKind::kParse, "config: unknown field '" + where + key + "'");
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

std::size_t local_index(const Observation& obs, std::size_t global) {
  const auto it = std::lower_bound(obs.selectable.begin(), obs.selectable.end(), global);
  if (it == obs.selectable.end() || *it != global)
    throw Error(ErrorKind::kInvalidArgument,
                "action " + std::to_string(global) + " is blocked or out of range");
  return static_cast<std::size_t>(it - obs.selectable.begin());
}

Feedback to_local(const Observation& obs, const Feedback& feedback) {
  return std::visit(
      [&](const auto& fb) -> Feedback {
        using T = std::decay_t<decltype(fb)>;
        if constexpr (std::is_same_v<T, ActionFeedback>) {
          return ActionFeedback{local_index(obs, fb.teacher_index)};
        } else if constexpr (std::is_same_v<T, PreferenceFeedback>) {
          return PreferenceFeedback{local_index(obs, fb.preferred_index),
                                    local_index(obs, fb.other_index)};
        } else if constexpr (std::is_same_v<T, CoactiveFeedback>) {
          return CoactiveFeedback{local_index(obs, fb.improved_index)};
        } else {
          return fb;
        }
      },
      feedback);
}

void check_start(const Map& map, const ActionSpec& spec) {
  const auto actions = generate_action_set(map.start_pose(), spec);
  if (mask_colliding(map, actions).empty())
    throw Error(ErrorKind::kValidation, "map: every action from the start pose collides");
}

}  // namespace

Rng make_trial_rng(const ExperimentConfig& config, std::uint64_t trial_seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.teacher.rng_seed),
                    static_cast<std::uint32_t>(config.teacher.rng_seed >> 32),
                    static_cast<std::uint32_t>(trial_seed),
                    static_cast<std::uint32_t>(trial_seed >> 32)};
  return Rng(seq);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "config: document must be an object");
  reject_unknown(doc,
                 {"map", "teacher", "channel", "steps", "trials", "eta", "k", "kappa_max",
                  "samples", "clip", "epsilon", "seed", "output", "window", "bc_samples",
                  "bc_epochs", "scales", "session"},
                 "");
  ExperimentConfig c;
  if (!doc.contains("map") || !doc["map"].is_string())
    throw Error(ErrorKind::kParse, "config: field 'map' must be a path string");
  std::filesystem::path map_path = doc["map"].get<std::string>();
  if (map_path.is_relative() && !base_dir.empty()) map_path = base_dir / map_path;
  c.map_path = map_path.lexically_normal().string();

  if (!doc.contains("teacher") || !doc["teacher"].is_object())
    throw Error(ErrorKind::kParse, "config: field 'teacher' must be an object");
  const auto& t = doc["teacher"];
  reject_unknown(t, {"w_star", "threshold", "sigma", "channel", "seed"}, "teacher.");
  if (!t.contains("w_star")) throw Error(ErrorKind::kParse, "config: field 'teacher.w_star' is missing");
  c.teacher.w_star = weights_from_json(t["w_star"]);
  c.teacher.threshold = field(t, "threshold", c.teacher.threshold);
  c.teacher.noise_sigma = field(t, "sigma", c.teacher.noise_sigma);
  c.teacher.channel = parse_channel(field<std::string>(t, "channel", "action"));
  c.teacher.rng_seed = field<std::uint64_t>(t, "seed", 0);
  if (doc.contains("channel"))
    c.teacher.channel = parse_channel(field<std::string>(doc, "channel", ""));
  c.teacher.epsilon = field(doc, "epsilon", c.teacher.epsilon);

  c.steps = field(doc, "steps", c.steps);
  c.trials = field(doc, "trials", c.trials);
  c.eta = field(doc, "eta", c.eta);
  c.actions.k = field(doc, "k", c.actions.k);
  c.actions.kappa_max = field(doc, "kappa_max", c.actions.kappa_max);
  c.actions.samples = field(doc, "samples", c.actions.samples);
  c.clip = field(doc, "clip", c.clip);
  c.seed = field(doc, "seed", c.seed);
  c.output_dir = field(doc, "output", c.output_dir);
  c.window = field(doc, "window", c.window);
  c.bc_samples = field(doc, "bc_samples", c.bc_samples);
  c.bc_epochs = field(doc, "bc_epochs", c.bc_epochs);
  if (doc.contains("scales")) {
    const auto& s = doc["scales"];
    reject_unknown(s, {"action", "semantic", "coactive"}, "scales.");
    c.scales.action = field(s, "action", c.scales.action);
    c.scales.semantic = field(s, "semantic", c.scales.semantic);
    c.scales.coactive = field(s, "coactive", c.scales.coactive);
  }
  if (doc.contains("session")) {
    const auto& s = doc["session"];
    reject_unknown(s, {"mode", "auto_advance_ms"}, "session.");
    const auto mode = field<std::string>(s, "mode", "stepper");
    if (mode == "stepper") {
      c.session_mode = SessionMode::kStepper;
    } else if (mode == "timed") {
      c.session_mode = SessionMode::kTimed;
    } else {
      throw Error(ErrorKind::kParse, "config: session.mode must be stepper or timed");
    }
    c.auto_advance_ms = field(s, "auto_advance_ms", c.auto_advance_ms);
  }

  if (c.steps < 1) config_error("steps must be >= 1");
  if (c.trials < 1) config_error("trials must be >= 1");
  if (!(c.eta > 0.0)) config_error("eta must be positive");
  if (c.actions.k < 2) config_error("k must be >= 2");
  if (!(c.actions.kappa_max > 0.0)) config_error("kappa_max must be positive");
  if (c.actions.samples < 1) config_error("samples must be >= 1");
  if (!(c.clip > 0.0)) config_error("clip must be positive");
  if (!(c.teacher.epsilon >= 0.0)) config_error("epsilon must be non-negative");
  if (!(c.teacher.threshold >= 0.0)) config_error("teacher.threshold must be non-negative");
  if (!(c.teacher.noise_sigma >= 0.0)) config_error("teacher.sigma must be non-negative");
  if (c.window < 1) config_error("window must be >= 1");
  if (c.bc_epochs < 1) config_error("bc_epochs must be >= 1");
  if (c.session_mode == SessionMode::kTimed && c.auto_advance_ms < 1)
    config_error("session.auto_advance_ms must be >= 1");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(doc, std::filesystem::path(path).parent_path());
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {
      {"map", c.map_path},
      {"teacher",
       {{"w_star", weights_to_json(c.teacher.w_star)},
        {"threshold", c.teacher.threshold},
        {"sigma", c.teacher.noise_sigma},
        {"channel", channel_name(c.teacher.channel)},
        {"seed", c.teacher.rng_seed}}},
      {"steps", c.steps},
      {"trials", c.trials},
      {"eta", c.eta},
      {"k", c.actions.k},
      {"kappa_max", c.actions.kappa_max},
      {"samples", c.actions.samples},
      {"clip", c.clip},
      {"epsilon", c.teacher.epsilon},
      {"seed", c.seed},
      {"output", c.output_dir},
      {"window", c.window},
      {"bc_samples", c.bc_samples},
      {"bc_epochs", c.bc_epochs},
      {"scales",
       {{"action", c.scales.action},
        {"semantic", c.scales.semantic},
        {"coactive", c.scales.coactive}}},
      {"session",
       {{"mode", c.session_mode == SessionMode::kTimed ? "timed" : "stepper"},
        {"auto_advance_ms", c.auto_advance_ms}}},
  };
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  auto doc = config_to_json(config);
  doc.erase("output");
  return fnv1a(doc.dump());
}

Observation observe(const Map& map, const WorldState& state, const ActionSpec& spec,
                    double clip) {
  Observation obs;
  obs.actions = generate_action_set(state.pose, spec);
  obs.selectable = mask_colliding(map, obs.actions);
  obs.features = features(map, state, obs.actions, clip);
  return obs;
}

std::optional<UpdateResult> apply_feedback(const Weights& w, const Observation& obs,
                                           std::size_t chosen, const Feedback& feedback,
                                           double eta, const LossScales& scales) {
  if (std::holds_alternative<NoFeedback>(feedback)) return std::nullopt;
  const std::size_t learner = local_index(obs, chosen);
  std::vector<FeatureVector> candidates;
  candidates.reserve(obs.selectable.size());
  for (std::size_t i : obs.selectable) candidates.push_back(obs.features[i]);

  auto pseudo = pseudo_loss_for(to_local(obs, feedback), candidates, learner, scales);
  UpdateResult out;
  out.pseudo = std::move(*pseudo);
  out.eval = hinge_eval(w, candidates, out.pseudo);
  out.weights = ogd_update(w, out.eval.subgradient, eta);
  out.pseudo_best = obs.selectable[out.pseudo.best_index];
  out.pseudo_regret_increment = out.pseudo.values[learner];
  return out;
}

void write_trial_csv(std::ostream& out, std::span<const StepRecord> steps) {
  out << kTrialCsvHeader << '\n';
  for (const StepRecord& r : steps) {
    out << r.t << ',' << r.chosen_index << ',' << format_double(r.latent_loss) << ','
        << (r.corrected ? 1 : 0) << ',' << kind_name(r.feedback_kind) << ','
        << format_double(r.pseudo_regret_increment) << ',' << (r.reset ? 1 : 0) << '\n';
  }
}

std::string trial_csv(std::span<const StepRecord> steps) {
  std::ostringstream out;
  write_trial_csv(out, steps);
  return out.str();
}

void append_record(TrialLog& log, const StepRecord& record, const Weights& weights) {
  const std::size_t corrections =
      (log.cumulative_corrections.empty() ? 0 : log.cumulative_corrections.back()) +
      (record.corrected ? 1 : 0);
  const double regret =
      (log.cumulative_regret.empty() ? 0.0 : log.cumulative_regret.back()) + record.latent_loss;
  log.steps.push_back(record);
  log.cumulative_corrections.push_back(corrections);
  log.cumulative_regret.push_back(regret);
  log.weight_digests.push_back(weights_digest(weights));
  log.final_weights = weights;
}

TrialLog run_trial(const ExperimentConfig& config, const Map& map, std::uint64_t trial_seed,
                   std::size_t trial_index) {
  require(config.steps >= 1, "steps must be >= 1");
  check_start(map, config.actions);
  const Teacher& teacher = config.teacher;
  Rng rng = make_trial_rng(config, trial_seed);

  TrialLog log;
  log.config_hash = config_hash(config);
  log.trial_index = trial_index;
  log.trial_seed = trial_seed;
  log.steps.reserve(config.steps);

  WorldState state = initial_state(map);
  Weights w;
  for (std::size_t t = 0; t < config.steps; ++t) {
    const Observation obs = observe(map, state, config.actions, config.clip);
    const std::size_t chosen = select_action(w, obs.features, obs.selectable);
    const LatentEval latent = latent_eval(teacher, obs.features, obs.selectable);
    const LatentEval noisy = perturb(latent, teacher.noise_sigma, rng);
    const Feedback feedback = decide_correction(teacher, noisy, chosen, obs.features, rng);

    StepRecord rec;
    rec.t = t;
    rec.chosen_index = chosen;
    rec.latent_loss = latent.loss_of(chosen);
    rec.feedback_kind = kind_of(feedback);
    if (auto update = apply_feedback(w, obs, chosen, feedback, config.eta, config.scales)) {
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
  }
  return log;
}

TrialLog run_trial(const ExperimentConfig& config, std::uint64_t trial_seed) {
  return run_trial(config, load_map_file(config.map_path), trial_seed);
}

std::vector<TrialLog> run_trials(const ExperimentConfig& config) {
  const Map map = load_map_file(config.map_path);
  check_start(map, config.actions);
  std::vector<TrialLog> logs(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  parallel_for(config.trials, [&](std::size_t i) {
    try {
      logs[i] = run_trial(config, map, config.seed + i, i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return logs;
}

BcBaseline run_bc_baseline(const ExperimentConfig& config, const Map& map) {
  if (config.teacher.channel != Channel::kAction)
    throw Error(ErrorKind::kValidation, "config: the behavior cloning baseline needs the action channel");
  check_start(map, config.actions);
  BcBaseline out;

  // Demonstrations come from rolling out the teacher's own argmax policy.
  WorldState state = initial_state(map);
  for (std::size_t i = 0; i < config.bc_samples; ++i) {
    const Observation obs = observe(map, state, config.actions, config.clip);
    const LatentEval latent = latent_eval(config.teacher, obs.features, obs.selectable);
    BcSample sample;
    for (std::size_t a : obs.selectable) {
      if (a == latent.best_index) sample.teacher_index = sample.features_all.size();
      sample.features_all.push_back(obs.features[a]);
    }
    out.dataset.push_back(std::move(sample));
    state = step(map, state, obs.actions[latent.best_index], config.actions);
  }
  out.fitted = bc_fit(out.dataset, config.bc_epochs, config.eta, config.scales.action);

  TrialLog& log = out.log;
  log.config_hash = config_hash(config);
  log.trial_seed = config.seed;
  state = initial_state(map);
  for (std::size_t t = 0; t < config.steps; ++t) {
    const Observation obs = observe(map, state, config.actions, config.clip);
    const std::size_t chosen = select_action(out.fitted, obs.features, obs.selectable);
    const LatentEval latent = latent_eval(config.teacher, obs.features, obs.selectable);
    StepRecord rec;
    rec.t = t;
    rec.chosen_index = chosen;
    rec.latent_loss = latent.loss_of(chosen);
    const WorldState next = step(map, state, obs.actions[chosen], config.actions);
    rec.reset = next.reset_count != state.reset_count || next.lap_count != state.lap_count;
    append_record(log, rec, out.fitted);
    state = next;
  }
  return out;
}

BcBaseline run_bc_baseline(const ExperimentConfig& config) {
  return run_bc_baseline(config, load_map_file(config.map_path));
}

Metrics compute_metrics(const TrialLog& log, std::size_t window) {
  require(window >= 1, "window must be >= 1");
  const std::size_t n = log.steps.size();
  require(window <= std::max<std::size_t>(n, 1), "window must not exceed the number of steps");
  Metrics m;
  m.smoothed_latent_loss.reserve(n);
  m.cumulative_corrections.reserve(n);
  m.cumulative_regret.reserve(n);
  double running = 0.0;
  double regret = 0.0;
  std::size_t corrections = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const StepRecord& r = log.steps[t];
    running += r.latent_loss;
    if (t >= window) running -= log.steps[t - window].latent_loss;
    m.smoothed_latent_loss.push_back(running / static_cast<double>(std::min(t + 1, window)));
    corrections += r.corrected ? 1 : 0;
    regret += r.latent_loss;
    m.cumulative_corrections.push_back(corrections);
    m.cumulative_regret.push_back(regret);
  }
  if (n == 0) return m;
  // Recompute the last window directly so drift in the running sum never
  // leaks into the headline number.
  double tail = 0.0;
  for (std::size_t t = n - std::min(n, window); t < n; ++t) tail += log.steps[t].latent_loss;
  m.final_smoothed_loss = tail / static_cast<double>(std::min(n, window));
  m.total_corrections = corrections;
  m.regret_total = regret;
  const std::size_t quarter = n / 4;
  m.regret_quarter = quarter == 0 ? 0.0 : m.cumulative_regret[quarter - 1];
  if (m.regret_total == 0.0) {
    m.regret_ratio = 1.0;
  } else if (m.regret_quarter == 0.0) {
    m.regret_ratio = std::numeric_limits<double>::infinity();
  } else {
    m.regret_ratio = m.regret_total / m.regret_quarter;
  }
  return m;
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "channel") return SweepAxis::kChannel;
  if (name == "sigma") return SweepAxis::kSigma;
  if (name == "threshold") return SweepAxis::kThreshold;
  throw Error(ErrorKind::kInvalidArgument, "unknown sweep axis '" + std::string(name) + "'");
}

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kChannel:
      return "channel";
    case SweepAxis::kSigma:
      return "sigma";
    case SweepAxis::kThreshold:
      break;
  }
  return "threshold";
}

std::vector<std::string> default_axis_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kChannel:
      return {"action", "preference", "semantic", "coactive"};
    case SweepAxis::kSigma:
      return {"0", "0.25", "0.5", "1"};
    case SweepAxis::kThreshold:
      break;
  }
  return {"0", "0.25", "0.5", "0.75", "1"};
}

ExperimentConfig with_axis_value(ExperimentConfig config, SweepAxis axis,
                                 const std::string& value) {
  if (axis == SweepAxis::kChannel) {
    config.teacher.channel = parse_channel(value);
    return config;
  }
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !(v >= 0.0))
    throw Error(ErrorKind::kInvalidArgument, "sweep value '" + value + "' is not a non-negative number");
  (axis == SweepAxis::kSigma ? config.teacher.noise_sigma : config.teacher.threshold) = v;
  return config;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                std::span<const std::string> values) {
  std::vector<std::string> axis_values(values.begin(), values.end());
  if (axis_values.empty()) axis_values = default_axis_values(axis);

  const Map map = load_map_file(base.map_path);
  std::vector<SweepRow> rows(axis_values.size());
  std::vector<std::optional<ExperimentConfig>> configs(axis_values.size());
  for (std::size_t v = 0; v < axis_values.size(); ++v) {
    rows[v].axis = axis;
    rows[v].value = axis_values[v];
    try {
      configs[v] = with_axis_value(base, axis, axis_values[v]);
    } catch (const std::exception& e) {
      rows[v].failed = base.trials;
      rows[v].error = e.what();
    }
  }

  struct Outcome {
    std::optional<Metrics> metrics;
    std::string error;
  };
  const std::size_t jobs = axis_values.size() * base.trials;
  std::vector<Outcome> outcomes(jobs);
  parallel_for(jobs, [&](std::size_t j) {
    const std::size_t v = j / base.trials;
    const std::size_t trial = j % base.trials;
    if (!configs[v]) return;
    try {
      const TrialLog log = run_trial(*configs[v], map, base.seed + trial, trial);
      outcomes[j].metrics = compute_metrics(log, std::min(base.window, base.steps));
    } catch (const std::exception& e) {
      outcomes[j].error = e.what();
    }
  });

  for (std::size_t v = 0; v < rows.size(); ++v) {
    SweepRow& row = rows[v];
    row.trials = base.trials;
    if (!configs[v]) continue;
    for (std::size_t trial = 0; trial < base.trials; ++trial) {
      const Outcome& o = outcomes[v * base.trials + trial];
      if (!o.metrics) {
        ++row.failed;
        if (row.error.empty()) row.error = o.error;
        continue;
      }
      row.final_losses.push_back(o.metrics->final_smoothed_loss);
      row.corrections.push_back(static_cast<double>(o.metrics->total_corrections));
      row.regret_ratios.push_back(o.metrics->regret_ratio);
    }
    row.final_loss_mean = mean(row.final_losses);
    row.final_loss_std = stddev(row.final_losses);
    row.corrections_mean = mean(row.corrections);
    row.corrections_std = stddev(row.corrections);
    row.regret_ratio_mean = mean(row.regret_ratios);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSummaryCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << axis_name(r.axis) << ',' << r.value << ',' << r.trials << ',' << r.failed << ','
        << format_double(r.final_loss_mean) << ',' << format_double(r.final_loss_std) << ','
        << format_double(r.corrections_mean) << ',' << format_double(r.corrections_std) << ','
        << format_double(r.regret_ratio_mean) << '\n';
  }
}

void write_trial_outputs(const std::filesystem::path& dir, std::span<const TrialLog> logs) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create output directory '" + dir.string() + "'");
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error(ErrorKind::kIo, "failed writing '" + path.string() + "'");
  };
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const std::string stem = "trial_" + std::to_string(logs[i].trial_index);
    write(dir / (stem + ".csv"), trial_csv(logs[i].steps));
    write(dir / (stem + "_weights.json"), weights_to_json(logs[i].final_weights).dump() + "\n");
  }
  if (!logs.empty())
    write(dir / "weights.json", weights_to_json(logs.front().final_weights).dump() + "\n");
}

}  // namespace corrlearn
