#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace corrlearn;
using namespace support;

namespace {

FeatureVector e(std::size_t d, double v = 1.0) {
  FeatureVector f{};
  f[d] = v;
  return f;
}

PseudoLoss from_values(std::vector<double> values) { return zero_bias(values); }

// Largest and second-largest hinge terms.
std::pair<double, double> top_two(const Weights& w, const std::vector<FeatureVector>& phi,
                                  const std::vector<double>& delta) {
  double a = -INFINITY, b = -INFINITY;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double t = delta[i] + oracle_dot(w.values, phi[i]);
    if (t > a) {
      b = a;
      a = t;
    } else if (t > b) {
      b = t;
    }
  }
  return {a, b};
}

}  // namespace

TEST_CASE("select_action") {
  Weights w;
  w.values = {1, -1, 0, 0, 0, 0, 0};
  const std::vector<FeatureVector> phi = {e(0, 1), e(0, 3), e(1, 2), e(0, 3)};
  CHECK(select_action(w, phi) == 1);  // tie between 1 and 3 goes low
  const std::vector<std::size_t> sel = {0, 2, 3};
  CHECK(select_action(w, phi, sel) == 3);
  const std::vector<std::size_t> only = {2};
  CHECK(select_action(w, phi, only) == 2);
  CHECK(select_action(Weights{}, phi) == 0);
  CHECK_THROWS_AS(select_action(w, phi, std::vector<std::size_t>{}), Error);
  CHECK_THROWS_AS(select_action(w, phi, std::vector<std::size_t>{4}), Error);
}

TEST_CASE("select_action agrees with the exhaustive oracle") {
  Gen gen(5);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t k = 1 + gen.index(64);
    const auto phi = gen.feature_set(k);
    const Weights w = gen.weights();
    std::vector<std::size_t> sel;
    for (std::size_t i = 0; i < k; ++i)
      if (gen.coin()) sel.push_back(i);
    if (sel.empty()) sel.push_back(gen.index(k));
    CHECK(select_action(w, phi, sel) == oracle_argmax(w, phi, sel));
    CHECK(select_action(w, phi) == oracle_argmax(w, phi, all_indices(k)));
  }
}

TEST_CASE("hinge_eval worked examples") {
  Weights w;
  w.values = {1, 0, 0, 0, 0, 0, 0};
  const std::vector<FeatureVector> phi = {e(0, 0), e(0, 1), e(0, 2)};
  SUBCASE("action loss toward index 0") {
    const auto eval = hinge_eval(w, phi, action_pseudo_loss(0, 3));
    CHECK(eval.loss == 102.0);
    CHECK(eval.selected_index == 2);
    CHECK(eval.subgradient == Vector{2, 0, 0, 0, 0, 0, 0});
  }
  SUBCASE("already best with a margin") {
    const auto eval = hinge_eval(w, phi, action_pseudo_loss(2, 3, 0.5));
    // terms: 0.5, 1.5, 2 -> the best action is the maximizer, loss 0.
    CHECK(eval.loss == 0.0);
    CHECK(eval.selected_index == 2);
    CHECK(eval.subgradient == Vector{});
  }
  SUBCASE("margin violated by a runner-up") {
    const auto eval = hinge_eval(w, phi, action_pseudo_loss(2, 3, 1.5));
    // terms: 1.5, 2.5, 2 -> index 1 wins, loss 0.5.
    CHECK(eval.loss == 0.5);
    CHECK(eval.selected_index == 1);
    CHECK(eval.subgradient == Vector{-1, 0, 0, 0, 0, 0, 0});
  }
  CHECK_THROWS_AS(hinge_eval(w, phi, action_pseudo_loss(0, 2)), Error);
}

TEST_CASE("hinge_eval matches the oracle") {
  Gen gen(8);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t k = 1 + gen.index(20);
    const auto phi = gen.feature_set(k);
    const Weights w = gen.weights();
    const auto pseudo = from_values(gen.losses(k));
    const auto eval = hinge_eval(w, phi, pseudo);
    CHECK(eval.loss == doctest::Approx(oracle_hinge(w, phi, pseudo.values, pseudo.best_index)));
    CHECK(eval.loss >= 0.0);
    for (std::size_t d = 0; d < kFeatureDim; ++d)
      CHECK(eval.subgradient[d] ==
            phi[eval.selected_index][d] - phi[pseudo.best_index][d]);
  }
}

TEST_CASE("ogd_update") {
  Weights w;
  w.values = {1, 2, 3, 4, 5, 6, 7};
  const Weights next = ogd_update(w, Vector{1, 1, 1, 1, 1, 1, -10}, 0.5);
  CHECK(next.values == Vector{0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 12});
  CHECK(ogd_update(w, Vector{}, 0.1) == w);
  CHECK_THROWS_AS(ogd_update(w, Vector{}, 0.0), Error);
  CHECK_THROWS_AS(ogd_update(w, Vector{NAN, 0, 0, 0, 0, 0, 0}, 0.1), Error);

  // One step on the action hinge moves w by eta * (phi_teacher - phi_sel).
  Gen gen(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + gen.index(10);
    const auto phi = gen.feature_set(k);
    const Weights w0 = gen.weights();
    const std::size_t teacher = gen.index(k);
    const double eta = gen.uniform(0.001, 0.5);
    const auto eval = hinge_eval(w0, phi, action_pseudo_loss(teacher, k));
    const Weights w1 = ogd_update(w0, eval.subgradient, eta);
    for (std::size_t d = 0; d < kFeatureDim; ++d)
      CHECK(w1.values[d] == doctest::Approx(w0.values[d] + eta * (phi[teacher][d] -
                                                                    phi[eval.selected_index][d])));
    // The step never lowers the teacher action's margin over the selection.
    const double before = oracle_dot(w0.values, phi[teacher]) - oracle_dot(w0.values, phi[eval.selected_index]);
    const double after = oracle_dot(w1.values, phi[teacher]) - oracle_dot(w1.values, phi[eval.selected_index]);
    CHECK(after >= before - 1e-9);
  }
}

TEST_CASE("coactive_update") {
  Weights w;
  w.values = {1, 1, 1, 1, 1, 1, 1};
  const Weights next = coactive_update(w, e(0, 3), e(1, 2));
  CHECK(next.values == Vector{4, -1, 1, 1, 1, 1, 1});
  CHECK(coactive_update(w, e(2), e(2)) == w);
}

TEST_CASE("property: OGD with eta 1 on the 0-1 loss is the coactive update") {
  Gen gen(14);
  int matched = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 2 + gen.index(20);
    const auto phi = gen.feature_set(k);
    const Weights w = gen.weights();
    const std::size_t chosen = select_action(w, phi);
    std::size_t improved = gen.index(k - 1);
    if (improved >= chosen) ++improved;
    const auto eval = hinge_eval(w, phi, coactive_pseudo_loss(improved, k));
    if (eval.selected_index != chosen) continue;
    ++matched;
    const Weights ogd = ogd_update(w, eval.subgradient, 1.0);
    const Weights co = coactive_update(w, phi[improved], phi[chosen]);
    CHECK(weights_digest(ogd) == weights_digest(co));
  }
  CHECK(matched > 1000);
}

TEST_CASE("property: the hinge bounds the pseudo-loss of the policy's action") {
  Gen gen(21);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t k = 1 + gen.index(30);
    const auto phi = gen.feature_set(k);
    const Weights w = gen.weights();
    const auto pseudo = from_values(gen.losses(k, 100.0));
    const double bound = hinge_eval(w, phi, pseudo).loss;
    CHECK(bound - pseudo.values[select_action(w, phi)] >= -1e-9);
  }
}

TEST_CASE("property: subgradient inequality and finite differences") {
  Gen gen(27);
  int compared = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t k = 1 + gen.index(20);
    const auto phi = gen.feature_set(k);
    const auto pseudo = from_values(gen.losses(k));
    const Weights w = gen.weights();
    const Weights v = gen.weights();
    const auto at_w = hinge_eval(w, phi, pseudo);
    const double at_v = hinge_eval(v, phi, pseudo).loss;
    double lin = at_w.loss;
    for (std::size_t d = 0; d < kFeatureDim; ++d)
      lin += at_w.subgradient[d] * (v.values[d] - w.values[d]);
    CHECK(at_v - lin >= -1e-9);

    const auto [first, second] = top_two(w, phi, pseudo.values);
    if (k > 1 && first - second <= 1e-3) continue;
    ++compared;
    const double h = 1e-6;
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      Weights up = w, down = w;
      up.values[d] += h;
      down.values[d] -= h;
      const double fd = (hinge_eval(up, phi, pseudo).loss - hinge_eval(down, phi, pseudo).loss) / (2 * h);
      CHECK(std::abs(fd - at_w.subgradient[d]) <= 1e-4 * std::max(1.0, std::abs(at_w.subgradient[d])));
    }
  }
  CHECK(compared > 2000);
}

TEST_CASE("property: the policy ignores positive scaling and constant shifts") {
  Gen gen(33);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 1 + gen.index(30);
    auto phi = gen.feature_set(k);
    const Weights w = gen.weights();
    const std::size_t base = select_action(w, phi);
    Weights scaled = w;
    const double c = gen.uniform(0.1, 10.0);
    for (double& x : scaled.values) x *= c;
    // Scaling can only move exact ties; random data has none.
    CHECK(select_action(scaled, phi) == base);
    const FeatureVector shift = gen.features();
    for (auto& f : phi)
      for (std::size_t d = 0; d < kFeatureDim; ++d) f[d] += shift[d];
    CHECK(select_action(w, phi) == base);
  }
}

TEST_CASE("bc_fit") {
  CHECK(bc_fit(std::vector<BcSample>{}, 5, 0.1) == Weights{});
  CHECK_THROWS_AS(bc_fit(std::vector<BcSample>{}, 0, 0.1), Error);

  // Separable: the teacher always takes the action with the largest feature 0.
  Gen gen(40);
  std::vector<BcSample> data;
  for (int i = 0; i < 30; ++i) {
    BcSample s;
    s.features_all = gen.feature_set(6);
    s.teacher_index = 0;
    for (std::size_t a = 1; a < 6; ++a)
      if (s.features_all[a][0] > s.features_all[s.teacher_index][0]) s.teacher_index = a;
    data.push_back(s);
  }
  const Weights fit = bc_fit(data, 200, 0.05, 1.0);
  std::size_t agree = 0;
  for (const BcSample& s : data) agree += select_action(fit, s.features_all) == s.teacher_index;
  CHECK(agree == data.size());
  CHECK(bc_fit(data, 200, 0.05, 1.0) == fit);
}

TEST_CASE("empirical_alpha") {
  CHECK(empirical_alpha(std::vector<GapPair>{{2, 2}, {3, 3}}) == 1.0);
  CHECK(empirical_alpha(std::vector<GapPair>{{1, 2}, {3, 3}, {5, 0}}) == 0.5);
  CHECK(empirical_alpha(std::vector<GapPair>{{0, 4}}) == 0.0);
  CHECK_THROWS_AS(empirical_alpha(std::vector<GapPair>{{1, 0}}), Error);
  CHECK_THROWS_AS(empirical_alpha(std::vector<GapPair>{}), Error);
}

TEST_CASE("weights digest and JSON") {
  Weights a;
  a.values = {0.1, -2, 3, 0, 0, 0, 1e-300};
  Weights b = a;
  CHECK(weights_digest(a) == weights_digest(b));
  b.values[6] = std::nextafter(b.values[6], 1.0);
  CHECK(weights_digest(a) != weights_digest(b));
  Weights z, nz;
  nz.values[0] = -0.0;
  CHECK(weights_digest(z) != weights_digest(nz));
  CHECK(weights_from_json(weights_to_json(a)) == a);
  CHECK(weights_to_json(a).size() == 7);
  CHECK_THROWS_AS(weights_from_json(nlohmann::json::array({1, 2})), Error);
  CHECK_THROWS_AS(weights_from_json(nlohmann::json{{"w", 1}}), Error);
}
