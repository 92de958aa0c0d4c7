#include "feedback.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corrlearn {
namespace {

constexpr std::array<std::string_view, 5> kKindNames = {
    "none", "action", "preference", "semantic", "coactive"};
constexpr std::array<const char*, kSemanticTargets> kTargetFields = {
    "doors", "stairs", "chairs", "path"};

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorKind::kParse, "feedback: " + why);
}

std::size_t index_field(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field)) malformed(std::string("missing '") + field + "'");
  const auto& v = doc[field];
  if (!v.is_number_integer() || v.get<long long>() < 0)
    malformed(std::string("'") + field + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string_view signal_name(SemanticSignal s) {
  switch (s) {
    case SemanticSignal::kPrefer:
      return "prefer";
    case SemanticSignal::kAvoid:
      return "avoid";
    case SemanticSignal::kNeutral:
      break;
  }
  return "neutral";
}

double distance(const FeatureVector& a, const FeatureVector& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kFeatureDim; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

}  // namespace

std::string_view kind_name(FeedbackKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

FeedbackKind parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return static_cast<FeedbackKind>(i);
  throw Error(ErrorKind::kParse, "unknown feedback kind '" + std::string(name) + "'");
}

bool SemanticSignals::any() const {
  return std::any_of(signal.begin(), signal.end(),
                     [](SemanticSignal s) { return s != SemanticSignal::kNeutral; });
}

FeedbackKind kind_of(const Feedback& feedback) {
  return static_cast<FeedbackKind>(feedback.index());
}

nlohmann::json feedback_to_json(const Feedback& feedback) {
  nlohmann::json doc;
  doc["kind"] = kind_name(kind_of(feedback));
  if (const auto* a = std::get_if<ActionFeedback>(&feedback)) {
    doc["teacher_index"] = a->teacher_index;
  } else if (const auto* p = std::get_if<PreferenceFeedback>(&feedback)) {
    doc["preferred_index"] = p->preferred_index;
    doc["other_index"] = p->other_index;
  } else if (const auto* s = std::get_if<SemanticFeedback>(&feedback)) {
    for (std::size_t t = 0; t < kSemanticTargets; ++t)
      doc[kTargetFields[t]] = signal_name(s->signals.signal[t]);
  } else if (const auto* c = std::get_if<CoactiveFeedback>(&feedback)) {
    doc["improved_index"] = c->improved_index;
  }
  return doc;
}

Feedback feedback_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) malformed("payload must be an object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) malformed("missing 'kind'");
  FeedbackKind kind;
  try {
    kind = parse_kind(doc["kind"].get<std::string>());
  } catch (const Error& e) {
    malformed(e.what());
  }
  switch (kind) {
    case FeedbackKind::kNone:
      return NoFeedback{};
    case FeedbackKind::kAction:
      return ActionFeedback{index_field(doc, "teacher_index")};
    case FeedbackKind::kPreference: {
      PreferenceFeedback p{index_field(doc, "preferred_index"),
                           index_field(doc, "other_index")};
      if (p.preferred_index == p.other_index) malformed("preference indices must differ");
      return p;
    }
    case FeedbackKind::kSemantic: {
      SemanticFeedback s;
      for (std::size_t t = 0; t < kSemanticTargets; ++t) {
        if (!doc.contains(kTargetFields[t])) continue;
        const auto& v = doc[kTargetFields[t]];
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name == "prefer") {
          s.signals.signal[t] = SemanticSignal::kPrefer;
        } else if (name == "avoid") {
          s.signals.signal[t] = SemanticSignal::kAvoid;
        } else if (name != "neutral") {
          malformed(std::string("'") + kTargetFields[t] +
                    "' must be prefer, avoid or neutral");
        }
      }
      if (!s.signals.any()) malformed("semantic feedback needs a non-neutral channel");
      return s;
    }
    case FeedbackKind::kCoactive:
      return CoactiveFeedback{index_field(doc, "improved_index")};
  }
  malformed("unreachable kind");
}

void validate_feedback(const Feedback& feedback, std::size_t k) {
  auto check = [k](std::size_t i) { require(i < k, "feedback index out of range"); };
  if (const auto* a = std::get_if<ActionFeedback>(&feedback)) {
    check(a->teacher_index);
  } else if (const auto* p = std::get_if<PreferenceFeedback>(&feedback)) {
    check(p->preferred_index);
    check(p->other_index);
    require(p->preferred_index != p->other_index, "preference indices must differ");
  } else if (const auto* s = std::get_if<SemanticFeedback>(&feedback)) {
    require(s->signals.any(), "semantic feedback needs a non-neutral channel");
  } else if (const auto* c = std::get_if<CoactiveFeedback>(&feedback)) {
    check(c->improved_index);
  }
}

PseudoLoss zero_bias(std::span<const double> raw) {
  require(!raw.empty(), "zero_bias needs a non-empty vector");
  for (double v : raw) require(std::isfinite(v), "pseudo-loss entries must be finite");
  const auto min_it = std::min_element(raw.begin(), raw.end());
  const double min = *min_it;
  PseudoLoss out;
  out.best_index = static_cast<std::size_t>(min_it - raw.begin());
  out.values.reserve(raw.size());
  for (double v : raw) out.values.push_back(v - min);
  return out;
}

PseudoLoss action_pseudo_loss(std::size_t teacher_index, std::size_t k, double scale) {
  require(teacher_index < k, "action index out of range");
  std::vector<double> raw(k, scale);
  raw[teacher_index] = 0.0;
  return zero_bias(raw);
}

PseudoLoss preference_pseudo_loss(std::span<const FeatureVector> features_all,
                                  std::size_t preferred_index, std::size_t other_index) {
  const std::size_t k = features_all.size();
  require(preferred_index < k && other_index < k, "preference index out of range");
  require(preferred_index != other_index, "preference indices must differ");
  const FeatureVector& preferred = features_all[preferred_index];
  const FeatureVector& other = features_all[other_index];
  std::vector<double> raw;
  raw.reserve(k);
  for (const FeatureVector& phi : features_all)
    raw.push_back(distance(preferred, phi) - distance(other, phi));
  return zero_bias(raw);
}

SemanticSignals extract_semantic_signals(std::span<const FeatureVector> features_all,
                                         std::size_t teacher_index,
                                         std::size_t learner_index, double epsilon) {
  require(teacher_index < features_all.size() && learner_index < features_all.size(),
          "semantic index out of range");
  require(epsilon >= 0.0, "semantic epsilon must be non-negative");
  SemanticSignals signals;
  for (std::size_t t = 0; t < kSemanticTargets; ++t) {
    const double teacher = features_all[teacher_index][kSemanticFeature[t]];
    const double learner = features_all[learner_index][kSemanticFeature[t]];
    if (teacher > learner + epsilon) {
      signals.signal[t] = SemanticSignal::kAvoid;
    } else if (teacher < learner - epsilon) {
      signals.signal[t] = SemanticSignal::kPrefer;
    }
  }
  if (!signals.any()) throw NoSemanticSignal();
  return signals;
}

PseudoLoss semantic_pseudo_loss(std::span<const FeatureVector> features_all,
                                const SemanticSignals& signals,
                                std::size_t learner_index, double scale) {
  require(learner_index < features_all.size(), "semantic index out of range");
  if (!signals.any()) throw NoSemanticSignal();
  std::vector<double> raw(features_all.size(), 0.0);
  for (std::size_t t = 0; t < kSemanticTargets; ++t) {
    const SemanticSignal s = signals.signal[t];
    if (s == SemanticSignal::kNeutral) continue;
    const double reference = features_all[learner_index][kSemanticFeature[t]];
    for (std::size_t a = 0; a < features_all.size(); ++a) {
      const double v = features_all[a][kSemanticFeature[t]];
      const bool satisfied = s == SemanticSignal::kAvoid ? v > reference : v < reference;
      if (!satisfied) raw[a] += scale;
    }
  }
  return zero_bias(raw);
}

PseudoLoss semantic_pseudo_loss(std::span<const FeatureVector> features_all,
                                std::size_t teacher_index, std::size_t learner_index,
                                double epsilon, double scale) {
  return semantic_pseudo_loss(
      features_all,
      extract_semantic_signals(features_all, teacher_index, learner_index, epsilon),
      learner_index, scale);
}

PseudoLoss coactive_pseudo_loss(std::size_t improved_index, std::size_t k, double scale) {
  require(improved_index < k, "coactive index out of range");
  std::vector<double> raw(k, scale);
  raw[improved_index] = 0.0;
  return zero_bias(raw);
}

std::optional<PseudoLoss> pseudo_loss_for(const Feedback& feedback,
                                          std::span<const FeatureVector> features_all,
                                          std::size_t learner_index,
                                          const LossScales& scales) {
  const std::size_t k = features_all.size();
  validate_feedback(feedback, k);
  return std::visit(
      [&](const auto& fb) -> std::optional<PseudoLoss> {
        using T = std::decay_t<decltype(fb)>;
        if constexpr (std::is_same_v<T, NoFeedback>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ActionFeedback>) {
          return action_pseudo_loss(fb.teacher_index, k, scales.action);
        } else if constexpr (std::is_same_v<T, PreferenceFeedback>) {
          return preference_pseudo_loss(features_all, fb.preferred_index, fb.other_index);
        } else if constexpr (std::is_same_v<T, SemanticFeedback>) {
          return semantic_pseudo_loss(features_all, fb.signals, learner_index,
                                      scales.semantic);
        } else {
          return coactive_pseudo_loss(fb.improved_index, k, scales.coactive);
        }
      },
      feedback);
}

}  // namespace corrlearn
