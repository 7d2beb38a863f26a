// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "uniform/objective.hpp"

namespace uniform {

/// Per-sample view of both consensus steps.
struct SampleInspection {
  std::size_t sample = 0;
  std::size_t num_teachers = 0;
  // Feature side, one entry per common-space dimension.
  std::vector<std::array<std::size_t, 3>> sign_histogram;  // counts of -, 0, +
  std::vector<int> voted_signs;
  std::vector<std::size_t> support;
  std::vector<double> dropped_fraction;  // 1 - support / num_teachers
  Vec x_hat;
  Vec mean;
  // Logit side.
  std::vector<std::pair<std::string, std::size_t>> teacher_votes;  // id, union class
  std::vector<std::size_t> vote_histogram;                         // over the union space
  std::size_t pseudo_class = 0;
  std::vector<std::pair<std::size_t, double>> p_hat_top;  // at most five, descending
};

SampleInspection inspect_sample(const TrainingSet& data, const Model& model, std::size_t sample);

std::string format_inspection(const SampleInspection& inspection, const UnionLabelSpace& space);

}  // namespace uniform
