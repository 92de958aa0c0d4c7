#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "feedback.hpp"
#include "world.hpp"

namespace corrlearn {

using Vector = std::array<double, kFeatureDim>;

struct Weights {
  Vector values{};

  bool operator==(const Weights&) const = default;
};

double dot(const Vector& a, const Vector& b);
double score(const Weights& w, const FeatureVector& phi);

// FNV-1a over the raw bytes of the weights; equal iff bit-identical.
std::uint64_t weights_digest(const Weights& w);

nlohmann::json weights_to_json(const Weights& w);
Weights weights_from_json(const nlohmann::json& doc);

// argmax over `selectable` of w . phi(a), lowest index on ties.
std::size_t select_action(const Weights& w, std::span<const FeatureVector> features_all,
                          std::span<const std::size_t> selectable);
std::size_t select_action(const Weights& w, std::span<const FeatureVector> features_all);

struct SurrogateEval {
  double loss = 0.0;
  std::size_t selected_index = 0;
  Vector subgradient{};
};

// Generalized hinge: max_i [delta_i + w.phi_i] - w.phi_best, with the
// subgradient phi_sel - phi_best. Descending it moves w toward phi_best.
SurrogateEval hinge_eval(const Weights& w, std::span<const FeatureVector> features_all,
                         const PseudoLoss& pseudo);

Weights ogd_update(const Weights& w, const Vector& gradient, double eta);

// Preference perceptron step: w + phi_improved - phi_chosen.
Weights coactive_update(const Weights& w, const FeatureVector& phi_improved,
                        const FeatureVector& phi_chosen);

struct BcSample {
  std::vector<FeatureVector> features_all;
  std::size_t teacher_index = 0;
};

Weights bc_fit(std::span<const BcSample> dataset, std::size_t epochs, double eta,
               double action_scale = 100.0);

struct GapPair {
  double to_pseudo_best = 0.0;  // l(a_t) - l(argmin pseudo)
  double to_latent_best = 0.0;  // l(a_t) - l(a*)
};

// Largest alpha with to_pseudo_best >= alpha * to_latent_best on every entry.
// Entries with a zero latent gap carry no information and are skipped.
double empirical_alpha(std::span<const GapPair> gaps);

}  // namespace corrlearn
