#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "feedback.hpp"
#include "learner.hpp"
#include "teacher.hpp"
#include "world.hpp"

namespace corrlearn {

enum class SessionMode { kStepper, kTimed };

struct ExperimentConfig {
  std::string map_path;  // resolved against the config file's directory
  Teacher teacher;
  std::size_t steps = 5000;
  std::size_t trials = 10;
  double eta = 0.01;
  ActionSpec actions;
  double clip = 3.0;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t window = 100;
  LossScales scales;
  std::size_t bc_samples = 50;
  std::size_t bc_epochs = 10;
  SessionMode session_mode = SessionMode::kStepper;
  std::size_t auto_advance_ms = 1000;
};

// Unknown keys and out-of-range values throw Error(kParse / kValidation).
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::string& path);

// The per-trial generator, seeded from the teacher seed and the trial seed.
Rng make_trial_rng(const ExperimentConfig& config, std::uint64_t trial_seed);
nlohmann::json config_to_json(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

// Everything the learner sees at one state.
struct Observation {
  std::vector<Trajectory> actions;
  std::vector<std::size_t> selectable;
  std::vector<FeatureVector> features;  // all k actions
};

Observation observe(const Map& map, const WorldState& state, const ActionSpec& spec,
                    double clip);

struct UpdateResult {
  Weights weights;
  SurrogateEval eval;          // indices local to the selectable set
  PseudoLoss pseudo;           // over the selectable set
  std::size_t pseudo_best = 0; // global action index
  double pseudo_regret_increment = 0.0;
};

// One hinge + OGD step for non-empty feedback, over the collision-free actions
// only. Returns nullopt for NoFeedback. Feedback naming a blocked action is an
// invalid argument.
std::optional<UpdateResult> apply_feedback(const Weights& w, const Observation& obs,
                                           std::size_t chosen, const Feedback& feedback,
                                           double eta, const LossScales& scales);

struct StepRecord {
  std::size_t t = 0;
  std::size_t chosen_index = 0;
  double latent_loss = 0.0;
  bool corrected = false;
  FeedbackKind feedback_kind = FeedbackKind::kNone;
  double pseudo_regret_increment = 0.0;
  bool reset = false;
};

struct TrialLog {
  std::uint64_t config_hash = 0;
  std::size_t trial_index = 0;
  std::uint64_t trial_seed = 0;
  std::vector<StepRecord> steps;
  Weights final_weights;
  std::vector<std::uint64_t> weight_digests;  // after each step's update
  std::vector<std::size_t> cumulative_corrections;
  std::vector<double> cumulative_regret;
  std::vector<GapPair> gaps;  // corrected steps only
  std::size_t update_count = 0;
};

inline constexpr const char* kTrialCsvHeader =
    "t,chosen_index,latent_loss,corrected,feedback_kind,pseudo_regret_increment,reset";

void write_trial_csv(std::ostream& out, std::span<const StepRecord> steps);
std::string trial_csv(std::span<const StepRecord> steps);

// Appends a record and keeps the cumulative curves in step.
void append_record(TrialLog& log, const StepRecord& record, const Weights& weights);

TrialLog run_trial(const ExperimentConfig& config, const Map& map, std::uint64_t trial_seed,
                   std::size_t trial_index = 0);
TrialLog run_trial(const ExperimentConfig& config, std::uint64_t trial_seed);

// config.trials trials with seeds config.seed + i, run concurrently, returned
// in trial order.
std::vector<TrialLog> run_trials(const ExperimentConfig& config);

struct BcBaseline {
  std::vector<BcSample> dataset;
  Weights fitted;
  TrialLog log;
};

BcBaseline run_bc_baseline(const ExperimentConfig& config, const Map& map);
BcBaseline run_bc_baseline(const ExperimentConfig& config);

struct Metrics {
  std::vector<double> smoothed_latent_loss;
  std::vector<std::size_t> cumulative_corrections;
  std::vector<double> cumulative_regret;
  std::size_t total_corrections = 0;
  double final_smoothed_loss = 0.0;
  double regret_total = 0.0;    // R(T)
  double regret_quarter = 0.0;  // R(T/4)
  double regret_ratio = 1.0;    // R(T)/R(T/4), 1 when R(T) == 0
};

Metrics compute_metrics(const TrialLog& log, std::size_t window);

enum class SweepAxis { kChannel, kSigma, kThreshold };

SweepAxis parse_axis(std::string_view name);
std::string_view axis_name(SweepAxis axis);
std::vector<std::string> default_axis_values(SweepAxis axis);
ExperimentConfig with_axis_value(ExperimentConfig config, SweepAxis axis,
                                 const std::string& value);

struct SweepRow {
  SweepAxis axis = SweepAxis::kChannel;
  std::string value;
  std::size_t trials = 0;
  std::size_t failed = 0;
  std::vector<double> final_losses;  // per successful trial
  std::vector<double> corrections;
  std::vector<double> regret_ratios;
  double final_loss_mean = 0.0;
  double final_loss_std = 0.0;
  double corrections_mean = 0.0;
  double corrections_std = 0.0;
  double regret_ratio_mean = 0.0;
  std::string error;  // first failure message, if any
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                std::span<const std::string> values = {});

inline constexpr const char* kSummaryCsvHeader =
    "axis,value,trials,failed,final_loss_mean,final_loss_std,corrections_mean,"
    "corrections_std,regret_ratio_mean";

void write_summary_csv(std::ostream& out, std::span<const SweepRow> rows);

// trial_<i>.csv, trial_<i>_weights.json and weights.json (trial 0) in `dir`.
void write_trial_outputs(const std::filesystem::path& dir, std::span<const TrialLog> logs);

std::string format_double(double v);

}  // namespace corrlearn
