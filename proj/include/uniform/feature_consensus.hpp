// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uniform/nn.hpp"

namespace uniform {

/// Maps one teacher's features into the common space and back.
struct TeacherAdapter {
  std::string teacher_id;
  AffineBlock encoder;  // D_i -> D
  AffineBlock decoder;  // D -> D_i

  static TeacherAdapter create(std::string teacher_id, std::size_t feature_dim, std::size_t common_dim, Rng& rng);

  std::size_t feature_dim() const noexcept { return encoder.in_dim(); }
  std::size_t common_dim() const noexcept { return encoder.out_dim(); }

  void zero_grads();
  void collect(std::vector<ParamRef>& out);
};

Vec encode(const TeacherAdapter& adapter, std::span<const double> feat);

/// Sum over teachers of ||decode(encode(x_i)) - x_i||_2 (not squared).
/// Gradients, scaled by `weight`, accumulate into encoder and decoder of
/// each adapter. A zero residual contributes a zero gradient.
double recon_loss(std::span<TeacherAdapter> adapters, std::span<const std::span<const double>> teacher_feats,
                  double weight = 1.0);

/// s = sgn(sum_i sgn(e_i)), element-wise.
std::vector<int> vote_signs(std::span<const Vec> encoded);

struct ConsensusResult {
  std::vector<int> s;
  Vec x_hat;
  std::vector<std::size_t> support_count;
};

/// Per dimension, mean over teachers whose sign equals s[d]. Tie dimensions
/// (s[d] == 0) and dimensions without support yield 0 with support 0.
ConsensusResult aggregate_voted(std::span<const Vec> encoded, std::span<const int> s);

/// Plain element-wise mean, summed in the same order as aggregate_voted.
Vec mean_features(std::span<const Vec> encoded);

/// Gradient of a loss w.r.t. each encoded vector, given its gradient w.r.t.
/// x_hat. The agreement mask is a constant.
std::vector<Vec> consensus_backward(std::span<const Vec> encoded, const ConsensusResult& result,
                                    std::span<const double> grad_x_hat);
std::vector<Vec> mean_backward(std::size_t num_teachers, std::span<const double> grad_mean);

enum class FeatureMetric { mse, radio };

std::string to_string(FeatureMetric metric);
FeatureMetric feature_metric_from_string(const std::string& text);

struct FeatureLoss {
  double value = 0.0;
  Vec grad_student;
  Vec grad_target;
};

/// mse: mean squared difference. radio: mean smooth-L1 (transition at 1)
/// plus 1 - cos(x, target); a zero-norm vector gives cosine 0 and no
/// gradient from that term.
FeatureLoss feature_loss(std::span<const double> x_student, std::span<const double> target, FeatureMetric metric);

}  // namespace uniform
