// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "uniform/label_space.hpp"

namespace uniform {
namespace {

UnionLabelSpace space_of(std::initializer_list<std::size_t> sizes) {
  std::vector<DatasetClasses> ds;
  for (std::size_t n : sizes) {
    DatasetClasses d{"ds" + std::to_string(ds.size()), {}};
    for (std::size_t c = 0; c < n; ++c) d.classes.push_back("c" + std::to_string(c));
    ds.push_back(d);
  }
  return UnionLabelSpace::build(ds);
}

TEST(UnionLabelSpace, SingleDataset) {
  const auto s = space_of({3});
  EXPECT_EQ(s.num_classes(), 3u);
  EXPECT_EQ(s.offsets(), (std::vector<std::size_t>{0}));
}

TEST(UnionLabelSpace, TwoLargeDatasets) {
  const auto s = space_of({200, 120});
  EXPECT_EQ(s.num_classes(), 320u);
  EXPECT_EQ(s.offsets(), (std::vector<std::size_t>{0, 200}));
  EXPECT_EQ(s.dataset_of(199), 0u);
  EXPECT_EQ(s.dataset_of(200), 1u);
}

TEST(UnionLabelSpace, ThreeSmallDatasets) {
  const auto s = space_of({2, 2, 2});
  EXPECT_EQ(s.offsets(), (std::vector<std::size_t>{0, 2, 4}));
  for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(s.dataset_of(c), c / 2);
  EXPECT_EQ(s.class_label(5), "ds2/c1");
}

TEST(UnionLabelSpace, SharedClassNamesStayDistinct) {
  const std::vector<DatasetClasses> ds{{"pets", {"husky", "cat"}}, {"dogs", {"husky"}}};
  const auto s = UnionLabelSpace::build(ds);
  EXPECT_EQ(s.num_classes(), 3u);
  EXPECT_EQ(s.class_label(0), "pets/husky");
  EXPECT_EQ(s.class_label(2), "dogs/husky");
}

TEST(UnionLabelSpace, Errors) {
  const std::vector<DatasetClasses> dup{{"a", {"x"}}, {"a", {"y"}}};
  EXPECT_THROW(UnionLabelSpace::build(dup), Error);
  const std::vector<DatasetClasses> empty_classes{{"a", {}}};
  EXPECT_THROW(UnionLabelSpace::build(empty_classes), Error);
  EXPECT_THROW(UnionLabelSpace::build(std::vector<DatasetClasses>{}), Error);
}

TEST(TeacherSubsetMap, Validate) {
  EXPECT_NO_THROW((TeacherSubsetMap{"t", {0, 3}}.validate(4)));
  EXPECT_THROW((TeacherSubsetMap{"t", {}}.validate(4)), Error);
  EXPECT_THROW((TeacherSubsetMap{"t", {4}}.validate(4)), Error);
  EXPECT_THROW((TeacherSubsetMap{"t", {2, 1}}.validate(4)), Error);
  EXPECT_THROW((TeacherSubsetMap{"t", {1, 1}}.validate(4)), Error);
}

TEST(ProjectProbs, Padding) {
  const auto s = space_of({10});
  const Vec p = project_probs(Vec{0.6, 0.4}, TeacherSubsetMap{"t", {3, 7}}, s);
  Vec expected(10, 0.0);
  expected[3] = 0.6;
  expected[7] = 0.4;
  EXPECT_EQ(p, expected);
}

TEST(ProjectProbs, FullSubsetIsIdentity) {
  const auto s = space_of({2, 1});
  const Vec in{0.2, 0.5, 0.3};
  EXPECT_EQ(project_probs(in, TeacherSubsetMap{"t", {0, 1, 2}}, s), in);
}

TEST(ProjectProbs, OneHot) {
  const auto s = space_of({4});
  EXPECT_EQ(project_probs(Vec{1.0}, TeacherSubsetMap{"t", {1}}, s), (Vec{0, 1, 0, 0}));
}

TEST(ProjectProbs, LengthMismatchThrows) {
  const auto s = space_of({4});
  EXPECT_THROW(project_probs(Vec{0.5, 0.5}, TeacherSubsetMap{"t", {1}}, s), Error);
}

TEST(Metrics, HandExample) {
  const auto s = space_of({2, 2});
  // A: class 0 5/5, class 1 4/5. B: class 2 1/2, class 3 1/2.
  std::vector<std::size_t> labels, preds;
  for (int i = 0; i < 5; ++i) labels.push_back(0), preds.push_back(0);
  for (int i = 0; i < 5; ++i) labels.push_back(1), preds.push_back(i == 0 ? 0 : 1);
  labels.insert(labels.end(), {2, 2, 3, 3});
  preds.insert(preds.end(), {2, 3, 3, 0});
  const auto m = compute_metrics(preds, labels, s);
  EXPECT_NEAR(*m.per_dataset_acc[0], 0.9, 1e-15);
  EXPECT_NEAR(*m.per_dataset_acc[1], 0.5, 1e-15);
  EXPECT_NEAR(m.avg_d, 0.7, 1e-15);
  EXPECT_NEAR(m.avg_c, 0.7, 1e-15);
  EXPECT_EQ(m.classes_evaluated, 4u);
  EXPECT_EQ(m.per_dataset_count, (std::vector<std::size_t>{10, 4}));
}

TEST(Metrics, AllCorrect) {
  const auto s = space_of({3, 2});
  const std::vector<std::size_t> y{0, 1, 2, 3, 4, 4};
  const auto m = compute_metrics(y, y, s);
  EXPECT_EQ(m.avg_d, 1.0);
  EXPECT_EQ(m.avg_c, 1.0);
}

TEST(Metrics, CrossDatasetConfusionChargedToLabelDataset) {
  const auto s = space_of({2, 2});
  const std::vector<std::size_t> y{1}, p{3};
  const auto m = compute_metrics(p, y, s);
  EXPECT_EQ(*m.per_dataset_acc[0], 0.0);
  EXPECT_FALSE(m.per_dataset_acc[1].has_value());
  EXPECT_EQ(m.avg_d, 0.0);
  EXPECT_EQ(m.classes_excluded, 3u);
}

TEST(Metrics, Errors) {
  const auto s = space_of({2});
  EXPECT_THROW(compute_metrics(std::vector<std::size_t>{}, std::vector<std::size_t>{}, s), Error);
  EXPECT_THROW(compute_metrics(std::vector<std::size_t>{0}, std::vector<std::size_t>{0, 1}, s), Error);
  EXPECT_THROW(compute_metrics(std::vector<std::size_t>{0}, std::vector<std::size_t>{2}, s), Error);
}

TEST(ProjectProbs, PreservesMassAndRecoversInput) {
  const auto s = space_of({3, 4});
  const TeacherSubsetMap map{"t", {1, 4, 6}};
  const Vec in{0.125, 0.5, 0.375};
  const Vec p = project_probs(in, map, s);
  double total = 0.0;
  for (double v : p) total += v;
  EXPECT_EQ(total, 1.0);
  for (std::size_t k = 0; k < in.size(); ++k) EXPECT_EQ(p[map.subset[k]], in[k]);
}

TEST(Metrics, BalancedClassesGiveEqualAverages) {
  // equal-sized datasets; with unequal class counts the two averages differ
  const auto s = space_of({3, 3});
  std::vector<std::size_t> labels, preds;
  // three samples per class, class c gets c % 3 right
  for (std::size_t c = 0; c < 6; ++c)
    for (std::size_t i = 0; i < 3; ++i) {
      labels.push_back(c);
      preds.push_back(i < c % 3 ? c : (c + 1) % 6);
    }
  const auto m = compute_metrics(preds, labels, s);
  EXPECT_NEAR(m.avg_d, m.avg_c, 1e-15);
  EXPECT_GE(m.avg_d, 0.0);
  EXPECT_LE(m.avg_d, 1.0);
}

TEST(UnionLabelSpace, Deterministic) {
  EXPECT_EQ(space_of({2, 5}), space_of({2, 5}));
}

}  // namespace
}  // namespace uniform
