// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uniform/config.hpp"
#include "uniform/objective.hpp"

namespace uniform {

/// Indices of predictive teachers whose raw feature dim equals the student
/// feature dim; these are the homogeneous teachers plain KD can use.
std::vector<std::size_t> kd_compatible_teachers(const TeacherBank& bank, std::size_t feature_dim);

/// dist(x, mean raw teacher feature) + cross-entropy against the mean
/// projected teacher probabilities (renormalized). Adapters are unused.
LossBreakdown kd_sample_loss(std::size_t sample, const TrainingSet& data, StudentModel& student,
                             const TrainConfig& config, double weight = 1.0);

/// UNIFORM's pipeline with both voting steps replaced by plain averaging:
/// the feature target is the mean encoded feature and the logit term is the
/// cross-entropy against the mean teacher distribution (plus its entropy).
LossBreakdown cflplus_sample_loss(std::size_t sample, const TrainingSet& data, Model& model,
                                  const TrainConfig& config, double weight = 1.0);

/// Batch means over `batch`, with gradients accumulated into the model.
LossBreakdown kd_loss(std::span<const std::size_t> batch, const TrainingSet& data, Model& model,
                      const TrainConfig& config);
LossBreakdown cflplus_loss(std::span<const std::size_t> batch, const TrainingSet& data, Model& model,
                           const TrainConfig& config);

}  // namespace uniform
