#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "feedback.hpp"
#include "learner.hpp"

namespace corrlearn {

using Rng = std::mt19937_64;

enum class Channel { kAction, kPreference, kSemantic, kCoactive };

std::string_view channel_name(Channel channel);
Channel parse_channel(std::string_view name);

// Programmatic teacher with latent utility w_star . phi.
struct Teacher {
  Weights w_star;
  double threshold = 1.0;
  double noise_sigma = 0.0;
  Channel channel = Channel::kAction;
  std::uint64_t rng_seed = 0;
  double epsilon = 0.1;  // semantic dead zone, meters
};

struct LatentEval {
  std::vector<std::size_t> selectable;
  std::vector<double> utility;  // w_star . phi for every action
  std::vector<double> loss;     // +inf for actions outside `selectable`
  std::size_t best_index = 0;

  double loss_of(std::size_t index) const { return loss.at(index); }
};

// loss(a) = utility(a*) - utility(a) with a* the argmax utility over
// `selectable` (lowest index on ties).
LatentEval latent_eval(const Teacher& teacher, std::span<const FeatureVector> features_all,
                       std::span<const std::size_t> selectable);

// Adds i.i.d. N(0, sigma^2) to each selectable loss, in selectable order, and
// re-derives best_index as the noisy argmin. sigma == 0 draws nothing.
LatentEval perturb(const LatentEval& latent, double sigma, Rng& rng);

// Silent when the (noisy) learner loss is within the threshold; otherwise
// feedback on the teacher's channel. Semantic corrections with no channel
// outside the dead zone degrade to silence.
Feedback decide_correction(const Teacher& teacher, const LatentEval& noisy,
                           std::size_t learner_index,
                           std::span<const FeatureVector> features_all, Rng& rng);

}  // namespace corrlearn
