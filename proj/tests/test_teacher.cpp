#include <doctest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"

using namespace corrlearn;
using namespace support;

namespace {

Teacher teacher_with(Channel channel, double threshold = 1.0) {
  Teacher t;
  t.w_star.values = {1, 0, 0, 0, 0, 0, 0};
  t.channel = channel;
  t.threshold = threshold;
  return t;
}

std::vector<FeatureVector> ramp(std::size_t k) {
  std::vector<FeatureVector> phi(k, FeatureVector{});
  for (std::size_t i = 0; i < k; ++i) phi[i][0] = static_cast<double>(i);
  return phi;
}

}  // namespace

TEST_CASE("latent_eval") {
  const Teacher t = teacher_with(Channel::kAction);
  const auto phi = ramp(5);
  const auto all = all_indices(5);
  const LatentEval le = latent_eval(t, phi, all);
  CHECK(le.best_index == 4);
  CHECK(le.loss == std::vector<double>{4, 3, 2, 1, 0});

  const std::vector<std::size_t> sel = {0, 2};
  const LatentEval masked = latent_eval(t, phi, sel);
  CHECK(masked.best_index == 2);
  CHECK(masked.loss[0] == 2.0);
  CHECK(masked.loss[2] == 0.0);
  CHECK(std::isinf(masked.loss[4]));
  CHECK_THROWS_AS(latent_eval(t, phi, std::vector<std::size_t>{}), Error);
}

TEST_CASE("latent_eval matches the oracle") {
  Gen gen(3);
  for (int trial = 0; trial < 2000; ++trial) {
    Teacher t;
    t.w_star = gen.weights();
    const std::size_t k = 1 + gen.index(40);
    const auto phi = gen.feature_set(k);
    std::vector<std::size_t> sel;
    for (std::size_t i = 0; i < k; ++i)
      if (gen.coin()) sel.push_back(i);
    if (sel.empty()) sel.push_back(gen.index(k));
    const LatentEval le = latent_eval(t, phi, sel);
    const std::size_t best = oracle_argmax(t.w_star, phi, sel);
    CHECK(le.best_index == best);
    for (std::size_t i : sel) {
      CHECK(le.loss[i] >= 0.0);
      CHECK(le.loss[i] == doctest::Approx(oracle_dot(t.w_star.values, phi[best]) -
                                          oracle_dot(t.w_star.values, phi[i])));
    }
  }
}

TEST_CASE("perturb") {
  const Teacher t = teacher_with(Channel::kAction);
  const auto phi = ramp(8);
  const LatentEval le = latent_eval(t, phi, all_indices(8));
  Rng rng(1);
  const Rng before = rng;
  const LatentEval same = perturb(le, 0.0, rng);
  CHECK(same.loss == le.loss);
  CHECK(same.best_index == le.best_index);
  CHECK(rng == before);  // sigma 0 draws nothing

  Rng a(99), b(99);
  CHECK(perturb(le, 0.5, a).loss == perturb(le, 0.5, b).loss);
  CHECK_THROWS_AS(perturb(le, -1.0, a), Error);

  // Noise only touches selectable entries.
  const LatentEval masked = latent_eval(t, phi, std::vector<std::size_t>{1, 3});
  const LatentEval noisy = perturb(masked, 2.0, a);
  CHECK(std::isinf(noisy.loss[0]));
  CHECK((noisy.best_index == 1 || noisy.best_index == 3));
}

TEST_CASE("perturb draws unit-variance noise") {
  Teacher t = teacher_with(Channel::kAction);
  const auto phi = ramp(1);
  const LatentEval le = latent_eval(t, phi, all_indices(1));
  Rng rng(2024);
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = perturb(le, 1.0, rng).loss[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.04);
  CHECK(sd > 0.97);
  CHECK(sd < 1.03);
}

TEST_CASE("decide_correction") {
  const auto phi = ramp(6);
  const auto all = all_indices(6);
  Rng rng(5);
  SUBCASE("silent within the threshold") {
    const Teacher t = teacher_with(Channel::kAction, 1.0);
    const LatentEval le = latent_eval(t, phi, all);
    CHECK(decide_correction(t, le, 4, phi, rng) == Feedback{NoFeedback{}});
    CHECK(decide_correction(t, le, 5, phi, rng) == Feedback{NoFeedback{}});
    CHECK(decide_correction(t, le, 3, phi, rng) == Feedback{ActionFeedback{5}});
  }
  SUBCASE("coactive names the best action") {
    const Teacher t = teacher_with(Channel::kCoactive, 0.0);
    const LatentEval le = latent_eval(t, phi, all);
    CHECK(decide_correction(t, le, 0, phi, rng) == Feedback{CoactiveFeedback{5}});
  }
  SUBCASE("preference pairs the learner with another action") {
    const Teacher t = teacher_with(Channel::kPreference, 0.0);
    const LatentEval le = latent_eval(t, phi, all);
    for (int i = 0; i < 200; ++i) {
      const Feedback fb = decide_correction(t, le, 2, phi, rng);
      const auto& p = std::get<PreferenceFeedback>(fb);
      CHECK(p.preferred_index != p.other_index);
      CHECK((p.preferred_index == 2 || p.other_index == 2));
      CHECK(le.loss[p.preferred_index] <= le.loss[p.other_index]);
    }
    // A single selectable action leaves nothing to compare against.
    const LatentEval lone = latent_eval(t, phi, std::vector<std::size_t>{0});
    Teacher strict = t;
    strict.threshold = -1.0;
    CHECK(decide_correction(strict, lone, 0, phi, rng) == Feedback{NoFeedback{}});
  }
  SUBCASE("semantic compares the best action with the learner's") {
    Teacher t = teacher_with(Channel::kSemantic, 0.0);
    t.w_star.values = {0, 1, 0, 0, 0, 0, 0};
    std::vector<FeatureVector> f(3, FeatureVector{});
    f[0][kDoorDist] = 3.0;
    f[1][kDoorDist] = 1.0;
    f[2][kDoorDist] = 1.05;
    const LatentEval le = latent_eval(t, f, all_indices(3));
    const Feedback fb = decide_correction(t, le, 1, f, rng);
    CHECK(std::get<SemanticFeedback>(fb).signals[SemanticTarget::kDoors] == SemanticSignal::kAvoid);
    // Within the dead zone the correction degrades to silence.
    Teacher near = t;
    near.threshold = -1.0;
    const LatentEval le2 = latent_eval(near, f, std::vector<std::size_t>{1, 2});
    CHECK(decide_correction(near, le2, 1, f, rng) == Feedback{NoFeedback{}});
  }
}

TEST_CASE("property: the teacher is silent exactly when the loss is within the threshold") {
  Gen gen(44);
  const Channel channels[] = {Channel::kAction, Channel::kPreference, Channel::kCoactive};
  for (int trial = 0; trial < 3000; ++trial) {
    Teacher t;
    t.w_star = gen.weights();
    t.threshold = gen.uniform(0.0, 5.0);
    t.channel = channels[gen.index(3)];
    const std::size_t k = 2 + gen.index(30);
    const auto phi = gen.feature_set(k);
    const LatentEval le = latent_eval(t, phi, all_indices(k));
    const std::size_t learner = gen.index(k);
    Rng rng(trial);
    const Feedback fb = decide_correction(t, le, learner, phi, rng);
    CHECK(std::holds_alternative<NoFeedback>(fb) == (le.loss[learner] <= t.threshold));
  }
}

TEST_CASE("property: noiseless action feedback is the true argmax and alpha is 1") {
  Gen gen(45);
  std::vector<GapPair> gaps;
  for (int trial = 0; trial < 2000; ++trial) {
    Teacher t;
    t.w_star = gen.weights();
    t.threshold = 0.0;
    const std::size_t k = 2 + gen.index(30);
    const auto phi = gen.feature_set(k);
    const LatentEval le = latent_eval(t, phi, all_indices(k));
    Rng rng(trial);
    const LatentEval noisy = perturb(le, 0.0, rng);
    const std::size_t learner = gen.index(k);
    const Feedback fb = decide_correction(t, noisy, learner, phi, rng);
    if (std::holds_alternative<NoFeedback>(fb)) continue;
    const std::size_t named = std::get<ActionFeedback>(fb).teacher_index;
    CHECK(named == oracle_argmax(t.w_star, phi, all_indices(k)));
    gaps.push_back({le.loss[learner] - le.loss[named], le.loss[learner] - le.loss[le.best_index]});
  }
  REQUIRE(gaps.size() > 1000);
  CHECK(empirical_alpha(gaps) == 1.0);
}

TEST_CASE("property: corrections never increase with the threshold on a fixed stream") {
  Gen gen(46);
  for (int stream = 0; stream < 20; ++stream) {
    Teacher t;
    t.w_star = gen.weights();
    std::vector<LatentEval> evals;
    std::vector<std::size_t> learners;
    for (int i = 0; i < 200; ++i) {
      const auto phi = gen.feature_set(16);
      evals.push_back(latent_eval(t, phi, all_indices(16)));
      learners.push_back(gen.index(16));
    }
    std::size_t previous = evals.size() + 1;
    for (double tau : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 100.0}) {
      t.threshold = tau;
      std::size_t count = 0;
      Rng rng(7);
      for (std::size_t i = 0; i < evals.size(); ++i)
        count += !std::holds_alternative<NoFeedback>(
            decide_correction(t, evals[i], learners[i], {}, rng));
      CHECK(count <= previous);
      previous = count;
    }
  }
}

TEST_CASE("channel names") {
  for (Channel c : {Channel::kAction, Channel::kPreference, Channel::kSemantic, Channel::kCoactive})
    CHECK(parse_channel(channel_name(c)) == c);
  CHECK_THROWS_AS(parse_channel("telepathy"), Error);
}
