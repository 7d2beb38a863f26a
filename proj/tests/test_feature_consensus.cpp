// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "uniform/feature_consensus.hpp"

namespace uniform {
namespace {

TeacherAdapter identity_adapter(std::size_t n) {
  TeacherAdapter a;
  a.teacher_id = "id";
  a.encoder = AffineBlock(DenseMatrix::identity(n), Vec(n, 0.0));
  a.decoder = AffineBlock(DenseMatrix::identity(n), Vec(n, 0.0));
  return a;
}

TEST(Encode, IdentityAdapter) {
  const auto a = identity_adapter(3);
  const Vec x{1, -2, 0.5};
  EXPECT_EQ(encode(a, x), x);
}

TEST(Encode, ZeroWeightsGiveBias) {
  TeacherAdapter a;
  a.encoder = AffineBlock(DenseMatrix(2, 3), Vec{4, -1});
  a.decoder = AffineBlock::zeros(2, 3);
  EXPECT_EQ(encode(a, Vec{9, 9, 9}), (Vec{4, -1}));
}

TEST(Encode, MatchesNaiveLoop) {
  Rng rng(8);
  const auto a = TeacherAdapter::create("t", 4, 2, rng);
  const Vec x{0.5, -1, 2, 0.25};
  const Vec e = encode(a, x);
  for (std::size_t r = 0; r < 2; ++r) {
    double v = a.encoder.bias[r];
    for (std::size_t c = 0; c < 4; ++c) v += a.encoder.weight(r, c) * x[c];
    EXPECT_DOUBLE_EQ(e[r], v);
  }
}

TEST(Encode, DimMismatchThrows) {
  Rng rng(8);
  const auto a = TeacherAdapter::create("t", 4, 2, rng);
  EXPECT_THROW(encode(a, Vec{1, 2}), Error);
}

TEST(Adapter, CreateShapesAndNames) {
  Rng rng(1);
  auto a = TeacherAdapter::create("p0_1", 5, 3, rng);
  EXPECT_EQ(a.feature_dim(), 5u);
  EXPECT_EQ(a.common_dim(), 3u);
  std::vector<ParamRef> params;
  a.collect(params);
  ASSERT_EQ(params.size(), 4u);
  EXPECT_EQ(params[0].name, "adapter.p0_1.encoder.weight");
  EXPECT_EQ(params[3].name, "adapter.p0_1.decoder.bias");
  EXPECT_EQ(params[2].value.size(), 15u);
}

TEST(ReconLoss, PerfectAutoencoderIsZero) {
  std::vector<TeacherAdapter> adapters{identity_adapter(2)};
  const Vec x{3, -4};
  const std::vector<std::span<const double>> feats{x};
  EXPECT_EQ(recon_loss(adapters, feats), 0.0);
  for (double g : adapters[0].encoder.grad_weight.flat()) EXPECT_EQ(g, 0.0);
}

TEST(ReconLoss, EuclideanNormNotSquared) {
  std::vector<TeacherAdapter> adapters{identity_adapter(2), identity_adapter(2)};
  adapters[1].decoder.bias = {3, 4};
  const Vec x{1, 1};
  const std::vector<std::span<const double>> feats{x, x};
  EXPECT_DOUBLE_EQ(recon_loss(adapters, feats), 5.0);
}

TEST(ReconLoss, CountMismatchThrows) {
  std::vector<TeacherAdapter> adapters{identity_adapter(2)};
  EXPECT_THROW(recon_loss(adapters, std::vector<std::span<const double>>{}), Error);
}

TEST(ReconLoss, GradientsMatchFiniteDifferences) {
  Rng rng(12);
  std::vector<TeacherAdapter> adapters{TeacherAdapter::create("a", 3, 2, rng), TeacherAdapter::create("b", 4, 2, rng)};
  const Vec xa{0.5, -1.0, 2.0}, xb{1.0, 0.3, -0.7, 0.1};
  const std::vector<std::span<const double>> feats{xa, xb};
  const double weight = 0.7;
  recon_loss(adapters, feats, weight);
  std::vector<ParamRef> params;
  for (auto& a : adapters) a.collect(params);
  const auto grads = testing::snapshot_grads(params);
  auto loss = [&] {
    std::vector<TeacherAdapter> copy = adapters;
    return weight * recon_loss(copy, feats, 0.0);
  };
  const auto check = testing::finite_difference_check(params, grads, loss);
  EXPECT_LE(check.max_rel_error, 1e-6) << check.worst;
}

TEST(VoteSigns, HandExample) {
  const std::vector<Vec> e{{0.5, -1}, {1.5, 2}, {-0.5, 1}};
  EXPECT_EQ(vote_signs(e), (std::vector<int>{1, 1}));
}

TEST(VoteSigns, PerfectOffsetTies) {
  const std::vector<Vec> e{{1, -2, 3}, {-1, 2, -3}};
  EXPECT_EQ(vote_signs(e), (std::vector<int>{0, 0, 0}));
}

TEST(VoteSigns, SingleTeacher) {
  const std::vector<Vec> e{{-0.1, 0, 4}};
  EXPECT_EQ(vote_signs(e), (std::vector<int>{-1, 0, 1}));
}

TEST(VoteSigns, MagnitudeDoesNotMatter) {
  const std::vector<Vec> e{{1000}, {-1e-9}, {-1e-9}};
  EXPECT_EQ(vote_signs(e), (std::vector<int>{-1}));
}

TEST(VoteSigns, Errors) {
  EXPECT_THROW(vote_signs(std::vector<Vec>{}), Error);
  EXPECT_THROW(vote_signs(std::vector<Vec>{{1, 2}, {1}}), Error);
}

TEST(AggregateVoted, HandExample) {
  const std::vector<Vec> e{{0.5, -1}, {1.5, 2}, {-0.5, 1}};
  const auto r = aggregate_voted(e, vote_signs(e));
  EXPECT_EQ(r.x_hat, (Vec{1.0, 1.5}));
  EXPECT_EQ(r.support_count, (std::vector<std::size_t>{2, 2}));
}

TEST(AggregateVoted, IdenticalTeachers) {
  const Vec v{0.3, -7, 0, 1e-5};
  const std::vector<Vec> e{v, v, v, v};
  const auto r = aggregate_voted(e, vote_signs(e));
  EXPECT_EQ(r.x_hat, v);
}

TEST(AggregateVoted, TieFallback) {
  const std::vector<Vec> e{{1, -2}, {-1, 2}};
  const auto r = aggregate_voted(e, vote_signs(e));
  EXPECT_EQ(r.s, (std::vector<int>{0, 0}));
  EXPECT_EQ(r.x_hat, (Vec{0, 0}));
  EXPECT_EQ(r.support_count, (std::vector<std::size_t>{0, 0}));
}

TEST(AggregateVoted, ZerosNeverJoinTheAverage) {
  // two zeros and one positive: s=+1, x_hat is the positive value alone
  const std::vector<Vec> e{{0}, {0}, {0.6}};
  const auto r = aggregate_voted(e, vote_signs(e));
  EXPECT_EQ(r.x_hat, (Vec{0.6}));
  EXPECT_EQ(r.support_count, (std::vector<std::size_t>{1}));
}

TEST(AggregateVoted, DimMismatchThrows) {
  const std::vector<Vec> e{{1, 2}};
  EXPECT_THROW(aggregate_voted(e, std::vector<int>{1}), Error);
}

TEST(AggregateVoted, ConflictSuppression) {
  const std::vector<Vec> e{{1, 1}, {1, 1}, {-1, -1}};
  EXPECT_EQ(mean_features(e), (Vec{1.0 / 3.0, 1.0 / 3.0}));
  EXPECT_EQ(aggregate_voted(e, vote_signs(e)).x_hat, (Vec{1, 1}));
}

TEST(AggregateVoted, MatchesOracleOnRandomInstances) {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(7), dims = 1 + rng.below(8);
    std::vector<Vec> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back(testing::random_signed_vector(rng, dims));
    const auto got = aggregate_voted(e, vote_signs(e));
    const auto want = testing::naive_consensus(e);
    ASSERT_EQ(got.s, want.s);
    ASSERT_EQ(got.support_count, want.support);
    for (std::size_t d = 0; d < dims; ++d) ASSERT_EQ(std::memcmp(&got.x_hat[d], &want.x_hat[d], sizeof(double)), 0);
  }
}

TEST(AggregateVoted, RemovingZeroTeacherKeepsTarget) {
  // the zero teacher never agrees with a nonzero vote, so support is unchanged
  const std::vector<Vec> with{{1, -2, 0.5}, {0.4, -1, -3}, {0, 0, 0}, {2, 1, 0.7}};
  const std::vector<Vec> without{{1, -2, 0.5}, {0.4, -1, -3}, {2, 1, 0.7}};
  const auto a = aggregate_voted(with, vote_signs(with));
  const auto b = aggregate_voted(without, vote_signs(without));
  EXPECT_EQ(a.support_count, b.support_count);
  EXPECT_EQ(a.x_hat, b.x_hat);
}

TEST(ConsensusBackward, MatchesFiniteDifferences) {
  // away from zero so the mask is locally constant
  const std::vector<Vec> e{{0.5, -1, 0.3}, {1.5, 2, -0.2}, {-0.5, 1, -0.9}, {0.8, 0.7, 0.1}};
  const Vec w{1.0, -2.0, 0.5};
  const auto r = aggregate_voted(e, vote_signs(e));
  const auto grads = consensus_backward(e, r, w);
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t d = 0; d < 3; ++d) {
      auto up = e, down = e;
      up[i][d] += 1e-6;
      down[i][d] -= 1e-6;
      const double numeric = (dot(aggregate_voted(up, r.s).x_hat, w) - dot(aggregate_voted(down, r.s).x_hat, w)) / 2e-6;
      EXPECT_NEAR(grads[i][d], numeric, 1e-8) << i << "," << d;
    }
  }
}

TEST(MeanBackward, SplitsEvenly) {
  const auto g = mean_backward(4, Vec{2, -8});
  ASSERT_EQ(g.size(), 4u);
  for (const auto& v : g) EXPECT_EQ(v, (Vec{0.5, -2}));
}

TEST(FeatureLoss, CoincidenceIsZero) {
  const Vec x{0.5, -2, 3};
  EXPECT_EQ(feature_loss(x, x, FeatureMetric::mse).value, 0.0);
  EXPECT_NEAR(feature_loss(x, x, FeatureMetric::radio).value, 0.0, 1e-15);
}

TEST(FeatureLoss, MseHandExample) {
  EXPECT_DOUBLE_EQ(feature_loss(Vec{0, 0}, Vec{3, 4}, FeatureMetric::mse).value, 12.5);
}

TEST(FeatureLoss, RadioOrthogonal) {
  // smooth-L1: |1| and |-1| sit on the linear branch, (1 - 0.5) each, mean 0.5
  const auto l = feature_loss(Vec{1, 0}, Vec{0, 1}, FeatureMetric::radio);
  EXPECT_DOUBLE_EQ(l.value, 0.5 + 1.0);
}

TEST(FeatureLoss, RadioZeroNormHasNoCosineGradient) {
  const auto l = feature_loss(Vec{0, 0}, Vec{0.2, -0.4}, FeatureMetric::radio);
  EXPECT_DOUBLE_EQ(l.value, (0.5 * 0.04 + 0.5 * 0.16) / 2 + 1.0);
  EXPECT_DOUBLE_EQ(l.grad_student[0], -0.1);
  EXPECT_DOUBLE_EQ(l.grad_student[1], 0.2);
}

TEST(FeatureLoss, DimMismatchThrows) {
  EXPECT_THROW(feature_loss(Vec{1}, Vec{1, 2}, FeatureMetric::mse), Error);
  EXPECT_THROW(feature_loss(Vec{}, Vec{}, FeatureMetric::mse), Error);
}

TEST(FeatureLoss, MetricNames) {
  EXPECT_EQ(feature_metric_from_string(to_string(FeatureMetric::radio)), FeatureMetric::radio);
  EXPECT_EQ(feature_metric_from_string("mse"), FeatureMetric::mse);
  EXPECT_THROW(feature_metric_from_string("l2"), Error);
}

class FeatureLossGrad : public ::testing::TestWithParam<FeatureMetric> {};

TEST_P(FeatureLossGrad, MatchesFiniteDifferences) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(5), t(5);
    for (double& v : x) v = rng.uniform(-2, 2);
    for (double& v : t) v = rng.uniform(-2, 2);
    const auto l = feature_loss(x, t, GetParam());
    for (std::size_t d = 0; d < 5; ++d) {
      for (int side = 0; side < 2; ++side) {
        Vec& v = side == 0 ? x : t;
        const double saved = v[d];
        v[d] = saved + 1e-6;
        const double up = feature_loss(x, t, GetParam()).value;
        v[d] = saved - 1e-6;
        const double down = feature_loss(x, t, GetParam()).value;
        v[d] = saved;
        const double analytic = side == 0 ? l.grad_student[d] : l.grad_target[d];
        EXPECT_NEAR(analytic, (up - down) / 2e-6, 1e-7);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Metrics, FeatureLossGrad, ::testing::Values(FeatureMetric::mse, FeatureMetric::radio),
                         [](const auto& info) { return to_string(info.param); });

}  // namespace
}  // namespace uniform
