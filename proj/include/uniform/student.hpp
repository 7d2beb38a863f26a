// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uniform/nn.hpp"

namespace uniform {

struct StudentShape {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
  double temperature = 1.0;
};

/// Feature extractor (ReLU MLP, input -> D) followed by a linear classifier
/// (D -> C) read through a tempered softmax.
struct StudentModel {
  std::vector<AffineBlock> feature_net;
  AffineBlock classifier;
  double temperature = 1.0;

  static StudentModel create(const StudentShape& shape, Rng& rng);

  StudentShape shape() const;
  std::size_t input_dim() const { return feature_net.front().in_dim(); }
  std::size_t feature_dim() const { return feature_net.back().out_dim(); }
  std::size_t num_classes() const { return classifier.out_dim(); }

  MlpOutput student_features(std::span<const double> input) const;
  Vec classify(std::span<const double> features) const;

  /// Backward through the feature net; accumulates parameter gradients.
  Vec features_backward(const MlpCache& cache, std::span<const double> grad_features);

  void zero_grads();
  void collect(std::vector<ParamRef>& out);
};

/// Lowest index attaining the maximum.
std::size_t predict(std::span<const double> p);

}  // namespace uniform
