#include "learner.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "error.hpp"

namespace corrlearn {

double dot(const Vector& a, const Vector& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kFeatureDim; ++i) sum += a[i] * b[i];
  return sum;
}

double score(const Weights& w, const FeatureVector& phi) { return dot(w.values, phi); }

std::uint64_t weights_digest(const Weights& w) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (double v : w.values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      hash ^= b;
      hash *= 1099511628211ULL;
    }
  }
  return hash;
}

nlohmann::json weights_to_json(const Weights& w) { return w.values; }

Weights weights_from_json(const nlohmann::json& doc) {
  if (!doc.is_array() || doc.size() != kFeatureDim)
    throw Error(ErrorKind::kParse, "weights must be an array of 7 numbers");
  Weights w;
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    if (!doc[i].is_number()) throw Error(ErrorKind::kParse, "weights must be numbers");
    w.values[i] = doc[i].get<double>();
    if (!std::isfinite(w.values[i]))
      throw Error(ErrorKind::kValidation, "weights must be finite");
  }
  return w;
}

std::size_t select_action(const Weights& w, std::span<const FeatureVector> features_all,
                          std::span<const std::size_t> selectable) {
  require(!selectable.empty(), "select_action needs a selectable action");
  std::size_t best = selectable.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i : selectable) {
    require(i < features_all.size(), "selectable index out of range");
    const double s = score(w, features_all[i]);
    if (s > best_score || (s == best_score && i < best)) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

std::size_t select_action(const Weights& w, std::span<const FeatureVector> features_all) {
  std::vector<std::size_t> all(features_all.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return select_action(w, features_all, all);
}

SurrogateEval hinge_eval(const Weights& w, std::span<const FeatureVector> features_all,
                         const PseudoLoss& pseudo) {
  require(!features_all.empty(), "hinge_eval needs at least one action");
  require(pseudo.values.size() == features_all.size(),
          "pseudo-loss and feature set sizes differ");
  const std::size_t best = pseudo.best_index;
  SurrogateEval out;
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < features_all.size(); ++i) {
    const double term = pseudo.values[i] + score(w, features_all[i]);
    if (term > max_term) {
      max_term = term;
      out.selected_index = i;
    }
  }
  out.loss = max_term - score(w, features_all[best]);
  for (std::size_t d = 0; d < kFeatureDim; ++d)
    out.subgradient[d] = features_all[out.selected_index][d] - features_all[best][d];
  return out;
}

Weights ogd_update(const Weights& w, const Vector& gradient, double eta) {
  require(eta > 0.0, "learning rate must be positive");
  for (double g : gradient) require(std::isfinite(g), "gradient must be finite");
  Weights next = w;
  for (std::size_t d = 0; d < kFeatureDim; ++d) next.values[d] -= eta * gradient[d];
  return next;
}

Weights coactive_update(const Weights& w, const FeatureVector& phi_improved,
                        const FeatureVector& phi_chosen) {
  Weights next = w;
  for (std::size_t d = 0; d < kFeatureDim; ++d)
    next.values[d] += phi_improved[d] - phi_chosen[d];
  return next;
}

Weights bc_fit(std::span<const BcSample> dataset, std::size_t epochs, double eta,
               double action_scale) {
  require(epochs >= 1, "bc_fit needs at least one epoch");
  Weights w;
  for (std::size_t e = 0; e < epochs; ++e) {
    for (const BcSample& sample : dataset) {
      const PseudoLoss pseudo =
          action_pseudo_loss(sample.teacher_index, sample.features_all.size(), action_scale);
      const SurrogateEval eval = hinge_eval(w, sample.features_all, pseudo);
      w = ogd_update(w, eval.subgradient, eta);
    }
  }
  return w;
}

double empirical_alpha(std::span<const GapPair> gaps) {
  double alpha = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const GapPair& g : gaps) {
    if (!(g.to_latent_best > 0.0)) continue;
    alpha = std::min(alpha, g.to_pseudo_best / g.to_latent_best);
    any = true;
  }
  if (!any) throw Error(ErrorKind::kInvalidArgument, "alpha is undefined without a positive latent gap");
  return alpha;
}

}  // namespace corrlearn
