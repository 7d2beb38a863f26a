// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "uniform/baselines.hpp"
#include "uniform/logit_consensus.hpp"

namespace uniform {
namespace {

// One sample, C=2, D=2, every teacher predictive over the full space with an
// identity adapter, so encoded features equal the raw ones.
struct Instance {
  TrainingSet data;
  Model model;
  TrainConfig config;

  Instance(const std::vector<Vec>& feats, const std::vector<Vec>& probs, Vec input = {0.3, -0.2}) {
    data.space = UnionLabelSpace::build(std::vector<DatasetClasses>{{"a", {"x", "y"}}});
    data.inputs = DenseMatrix(1, 2, input);
    data.bank.n_samples = 1;
    for (std::size_t i = 0; i < feats.size(); ++i) {
      const std::string id = "t" + std::to_string(i);
      data.bank.teachers.push_back({id, TeacherKind::predictive, DenseMatrix(1, 2, feats[i]), DenseMatrix(1, 2, probs[i]),
                                    TeacherSubsetMap{id, {0, 1}}});
    }
    config.common_dim = 2;
    config.hidden = {};
    config.alpha1 = 1.0;
    config.alpha2 = 1.0;
    model = Model::create(data, config);
    model.student.feature_net = {AffineBlock(DenseMatrix::identity(2), Vec(2, 0.0))};
    for (auto& a : model.adapters) {
      a.encoder = AffineBlock(DenseMatrix::identity(2), Vec(2, 0.0));
      a.decoder = AffineBlock(DenseMatrix::from_rows({{0.9, 0.1}, {0, 1.2}}), Vec{0.05, 0});
    }
  }

  LossBreakdown loss(Method method) {
    config.method = method;
    const std::vector<std::size_t> batch{0};
    return total_loss(batch, data, model, config);
  }
};

TEST(Kd, CoincidenceLeavesOnlyEntropy) {
  const Vec feat{0.4, -1.1}, probs{0.3, 0.7};
  Instance inst({feat}, {probs}, feat);
  // classifier reproduces the teacher distribution exactly
  inst.model.student.classifier = AffineBlock(DenseMatrix(2, 2), Vec{std::log(0.3), std::log(0.7)});
  const auto l = inst.loss(Method::kd);
  EXPECT_EQ(l.feature, 0.0);
  EXPECT_NEAR(l.logit, entropy(probs), 1e-15);
  EXPECT_NEAR(l.total, entropy(probs), 1e-15);
  EXPECT_EQ(l.rec, 0.0);
}

TEST(Kd, DuplicateTeachersEquivalentToOne) {
  const Vec f{0.5, 0.2}, p{0.6, 0.4};
  Instance one({f}, {p}), two({f, f}, {p, p});
  const auto a = one.loss(Method::kd);
  const auto b = two.loss(Method::kd);
  EXPECT_EQ(a.total, b.total);
  EXPECT_EQ(testing::snapshot_grads(one.model.params())[0], testing::snapshot_grads(two.model.params())[0]);
}

TEST(Kd, TeacherPermutationInvariant) {
  const std::vector<Vec> f{{0.5, 0.2}, {-1, 3}, {0.25, 0.25}}, p{{0.6, 0.4}, {0.1, 0.9}, {0.5, 0.5}};
  Instance a(f, p), b({f[2], f[0], f[1]}, {p[2], p[0], p[1]});
  EXPECT_NEAR(a.loss(Method::kd).total, b.loss(Method::kd).total, 1e-14);
}

TEST(Kd, BetaOneWeightsFeatureTerm) {
  Instance inst({{2, 0}}, {{0.5, 0.5}});
  inst.config.beta1 = 0.25;
  const auto l = inst.loss(Method::kd);
  EXPECT_NEAR(l.total, l.logit + 0.25 * l.feature, 1e-15);
}

TEST(Kd, OnlyDimensionCompatiblePredictiveTeachersCount) {
  Rng rng(3);
  auto data = testing::tiny_training_set(rng, 2, 2);  // t0 dim 2, t1 dim 3, u0 dim 2 (descriptive)
  EXPECT_EQ(kd_compatible_teachers(data.bank, 2), (std::vector<std::size_t>{0}));
  EXPECT_EQ(kd_compatible_teachers(data.bank, 3), (std::vector<std::size_t>{1}));
  auto cfg = testing::tiny_config();
  cfg.common_dim = 5;
  Model m = Model::create(data, cfg);
  try {
    kd_loss(std::vector<std::size_t>{0}, data, m, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cflplus"), std::string::npos);
  }
}

TEST(Kd, AdaptersUntouched) {
  Rng rng(3);
  const auto data = testing::tiny_training_set(rng, 4, 1);
  const auto cfg = testing::tiny_config();
  Model m = Model::create(data, cfg);
  const auto l = kd_loss(std::vector<std::size_t>{0, 1, 2, 3}, data, m, cfg);
  EXPECT_EQ(l.rec, 0.0);
  for (const auto& p : m.params()) {
    if (p.name.rfind("adapter.", 0) != 0) continue;
    for (double g : p.grad) EXPECT_EQ(g, 0.0);
  }
}

class BaselineGradient : public ::testing::TestWithParam<Method> {};

TEST_P(BaselineGradient, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    const auto data = testing::tiny_training_set(rng, 3, 1);
    auto cfg = testing::tiny_config();
    cfg.method = GetParam();
    Model m = Model::create(data, cfg);
    for (const auto& p : m.params())
      for (double& v : p.value) v = rng.uniform(-1, 1);
    const std::vector<std::size_t> batch{0, 1, 2};
    total_loss(batch, data, m, cfg);
    const auto params = m.params();
    const auto grads = testing::snapshot_grads(params);
    const auto check = testing::finite_difference_check(params, grads, [&] { return total_loss(batch, data, m, cfg).total; });
    EXPECT_LE(check.max_rel_error, 1e-4) << check.worst;
  }
}

INSTANTIATE_TEST_SUITE_P(Methods, BaselineGradient, ::testing::Values(Method::kd, Method::cflplus),
                         [](const auto& info) { return to_string(info.param); });

TEST(CflPlus, UnanimousSignsGiveUniformTarget) {
  const std::vector<Vec> e{{0.5, -1}, {1.5, -2}, {0.25, -0.125}};
  EXPECT_EQ(mean_features(e), aggregate_voted(e, vote_signs(e)).x_hat);
}

TEST(CflPlus, MatchesUniformWithoutConflicts) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec> feats, probs;
    const std::size_t n = 1 + rng.below(4);
    const double s0 = rng.uniform() < 0.5 ? -1 : 1, s1 = rng.uniform() < 0.5 ? -1 : 1;
    for (std::size_t i = 0; i < n; ++i) {
      feats.push_back({s0 * rng.uniform(0.1, 2), s1 * rng.uniform(0.1, 2)});
      const double q = rng.uniform(0.05, 0.95);
      probs.push_back({q, 1 - q});
    }
    Instance inst(feats, probs);
    const auto u = inst.loss(Method::uniform);
    const auto gu = testing::snapshot_grads(inst.model.params());
    const auto c = inst.loss(Method::cflplus);
    const auto gc = testing::snapshot_grads(inst.model.params());
    EXPECT_NEAR(u.total, c.total, 1e-10);
    EXPECT_NEAR(u.logit, c.logit, 1e-10);
    EXPECT_EQ(u.feature, c.feature);
    for (std::size_t k = 0; k < gu.size(); ++k)
      for (std::size_t i = 0; i < gu[k].size(); ++i) EXPECT_NEAR(gu[k][i], gc[k][i], 1e-10);
  }
}

TEST(CflPlus, ConflictsChangeOnlyTheFeatureTarget) {
  Instance inst({{1, 1}, {1, 1}, {-1, -1}}, {{0.7, 0.3}, {0.6, 0.4}, {0.2, 0.8}});
  const auto u = inst.loss(Method::uniform);
  const auto c = inst.loss(Method::cflplus);
  EXPECT_NEAR(u.logit, c.logit, 1e-12);
  EXPECT_EQ(u.rec, c.rec);
  EXPECT_NE(u.feature, c.feature);
  const Vec x{0.3, -0.2};
  EXPECT_NEAR(u.feature, feature_loss(x, Vec{1, 1}, FeatureMetric::mse).value, 1e-15);
  EXPECT_NEAR(c.feature, feature_loss(x, Vec{1.0 / 3, 1.0 / 3}, FeatureMetric::mse).value, 1e-15);
}

TEST(CflPlus, PerfectOffsetPullsStudentToZero) {
  Instance inst({{1, -2}, {-1, 2}}, {{0.5, 0.5}, {0.5, 0.5}}, {0.6, 0.8});
  const auto l = inst.loss(Method::cflplus);
  EXPECT_DOUBLE_EQ(l.feature, (0.36 + 0.64) / 2);
  const auto u = inst.loss(Method::uniform);
  EXPECT_DOUBLE_EQ(u.feature, l.feature);  // x_hat is zero too
}

TEST(CflPlus, LogitTermIsCrossEntropyPlusEntropyOfMean) {
  Instance inst({{1, 0.5}, {0.2, 0.1}}, {{0.9, 0.1}, {0.3, 0.7}});
  inst.config.alpha1 = 3.0;  // ignored by the baseline
  const auto l = inst.loss(Method::cflplus);
  const Vec p = inst.model.student.classify(Vec{0.3, -0.2});
  const Vec pbar{0.6, 0.4};
  EXPECT_NEAR(l.logit, entropy(pbar) - 0.6 * std::log(p[0]) - 0.4 * std::log(p[1]), 1e-14);
}

}  // namespace
}  // namespace uniform
