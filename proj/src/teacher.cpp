#include "teacher.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "error.hpp"

namespace corrlearn {
namespace {

constexpr std::array<std::string_view, 4> kChannelNames = {"action", "preference",
                                                           "semantic", "coactive"};

}  // namespace

std::string_view channel_name(Channel channel) {
  return kChannelNames[static_cast<std::size_t>(channel)];
}

Channel parse_channel(std::string_view name) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i)
    if (kChannelNames[i] == name) return static_cast<Channel>(i);
  throw Error(ErrorKind::kParse, "unknown feedback channel '" + std::string(name) + "'");
}

LatentEval latent_eval(const Teacher& teacher, std::span<const FeatureVector> features_all,
                       std::span<const std::size_t> selectable) {
  require(!selectable.empty(), "latent_eval needs a selectable action");
  LatentEval out;
  out.selectable.assign(selectable.begin(), selectable.end());
  out.utility.resize(features_all.size());
  for (std::size_t i = 0; i < features_all.size(); ++i)
    out.utility[i] = score(teacher.w_star, features_all[i]);
  out.best_index = select_action(teacher.w_star, features_all, selectable);
  out.loss.assign(features_all.size(), std::numeric_limits<double>::infinity());
  const double best = out.utility[out.best_index];
  for (std::size_t i : selectable) out.loss[i] = best - out.utility[i];
  return out;
}

LatentEval perturb(const LatentEval& latent, double sigma, Rng& rng) {
  require(sigma >= 0.0, "noise sigma must be non-negative");
  if (sigma == 0.0) return latent;
  LatentEval noisy = latent;
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t i : noisy.selectable) noisy.loss[i] += noise(rng);
  std::size_t best = noisy.selectable.front();
  for (std::size_t i : noisy.selectable)
    if (noisy.loss[i] < noisy.loss[best] || (noisy.loss[i] == noisy.loss[best] && i < best))
      best = i;
  noisy.best_index = best;
  return noisy;
}

Feedback decide_correction(const Teacher& teacher, const LatentEval& noisy,
                           std::size_t learner_index,
                           std::span<const FeatureVector> features_all, Rng& rng) {
  if (noisy.loss_of(learner_index) <= teacher.threshold) return NoFeedback{};
  switch (teacher.channel) {
    case Channel::kAction:
      return ActionFeedback{noisy.best_index};
    case Channel::kCoactive:
      return CoactiveFeedback{noisy.best_index};
    case Channel::kPreference: {
      if (noisy.selectable.size() < 2) return NoFeedback{};
      const auto& sel = noisy.selectable;
      const auto learner_pos = std::find(sel.begin(), sel.end(), learner_index) - sel.begin();
      require(learner_pos < static_cast<std::ptrdiff_t>(sel.size()),
              "learner action is not selectable");
      // Uniform over the selectable actions other than the learner's.
      std::uniform_int_distribution<std::size_t> pick(0, sel.size() - 2);
      std::size_t slot = pick(rng);
      if (slot >= static_cast<std::size_t>(learner_pos)) ++slot;
      const std::size_t other = sel[slot];
      if (noisy.loss_of(other) < noisy.loss_of(learner_index))
        return PreferenceFeedback{other, learner_index};
      return PreferenceFeedback{learner_index, other};
    }
    case Channel::kSemantic:
      try {
        return SemanticFeedback{extract_semantic_signals(features_all, noisy.best_index,
                                                         learner_index, teacher.epsilon)};
      } catch (const NoSemanticSignal&) {
        return NoFeedback{};
      }
  }
  return NoFeedback{};
}

}  // namespace corrlearn
