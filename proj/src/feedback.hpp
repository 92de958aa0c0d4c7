#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "world.hpp"

namespace corrlearn {

enum class FeedbackKind { kNone, kAction, kPreference, kSemantic, kCoactive };

std::string_view kind_name(FeedbackKind kind);
FeedbackKind parse_kind(std::string_view name);

enum class SemanticSignal { kNeutral, kPrefer, kAvoid };

// Channels a semantic command can address. "prefer" means closer: a smaller
// distance sum for objects, a smaller cross-track error for the path.
enum class SemanticTarget : std::size_t { kDoors = 0, kStairs, kChairs, kPath };
inline constexpr std::size_t kSemanticTargets = 4;

inline constexpr std::array<FeatureIndex, kSemanticTargets> kSemanticFeature = {
    kDoorDist, kStairDist, kChairDist, kCrossTrack};

struct SemanticSignals {
  std::array<SemanticSignal, kSemanticTargets> signal{};

  bool any() const;
  SemanticSignal operator[](SemanticTarget t) const {
    return signal[static_cast<std::size_t>(t)];
  }
  SemanticSignal& operator[](SemanticTarget t) {
    return signal[static_cast<std::size_t>(t)];
  }
  bool operator==(const SemanticSignals&) const = default;
};

struct NoFeedback {
  bool operator==(const NoFeedback&) const = default;
};
struct ActionFeedback {
  std::size_t teacher_index = 0;
  bool operator==(const ActionFeedback&) const = default;
};
struct PreferenceFeedback {
  std::size_t preferred_index = 0;
  std::size_t other_index = 0;
  bool operator==(const PreferenceFeedback&) const = default;
};
struct SemanticFeedback {
  SemanticSignals signals;
  bool operator==(const SemanticFeedback&) const = default;
};
struct CoactiveFeedback {
  std::size_t improved_index = 0;
  bool operator==(const CoactiveFeedback&) const = default;
};

using Feedback = std::variant<NoFeedback, ActionFeedback, PreferenceFeedback,
                              SemanticFeedback, CoactiveFeedback>;

FeedbackKind kind_of(const Feedback& feedback);

// {"kind": "action", "teacher_index": 12} and friends; malformed documents
// throw Error(kParse).
nlohmann::json feedback_to_json(const Feedback& feedback);
Feedback feedback_from_json(const nlohmann::json& doc);

// Throws Error(kInvalidArgument) if an index is outside [0, k).
void validate_feedback(const Feedback& feedback, std::size_t k);

struct PseudoLoss {
  std::vector<double> values;  // min == 0 exactly
  std::size_t best_index = 0;  // lowest argmin
};

PseudoLoss zero_bias(std::span<const double> raw);

struct LossScales {
  double action = 100.0;
  double semantic = 100.0;
  double coactive = 1.0;
};

PseudoLoss action_pseudo_loss(std::size_t teacher_index, std::size_t k,
                              double scale = 100.0);

// ||phi(a_p) - phi(a)|| - ||phi(a_np) - phi(a)||, zero-biased.
PseudoLoss preference_pseudo_loss(std::span<const FeatureVector> features_all,
                                  std::size_t preferred_index,
                                  std::size_t other_index);

class NoSemanticSignal : public Error {
 public:
  NoSemanticSignal() : Error(ErrorKind::kInvalidArgument, "no semantic signal") {}
};

// Compares the teacher's action with the learner's channel by channel;
// differences within epsilon are neutral. Throws NoSemanticSignal when every
// channel is neutral.
SemanticSignals extract_semantic_signals(std::span<const FeatureVector> features_all,
                                         std::size_t teacher_index,
                                         std::size_t learner_index, double epsilon);

// Per active channel, actions that satisfy the signal strictly relative to
// the learner's value cost 0, the rest `scale`; channel losses are summed.
PseudoLoss semantic_pseudo_loss(std::span<const FeatureVector> features_all,
                                const SemanticSignals& signals,
                                std::size_t learner_index, double scale = 100.0);
PseudoLoss semantic_pseudo_loss(std::span<const FeatureVector> features_all,
                                std::size_t teacher_index, std::size_t learner_index,
                                double epsilon, double scale = 100.0);

PseudoLoss coactive_pseudo_loss(std::size_t improved_index, std::size_t k,
                                double scale = 1.0);

// Dispatches on the feedback tag; NoFeedback yields nullopt (no loss applied).
std::optional<PseudoLoss> pseudo_loss_for(const Feedback& feedback,
                                          std::span<const FeatureVector> features_all,
                                          std::size_t learner_index,
                                          const LossScales& scales = {});

}  // namespace corrlearn
