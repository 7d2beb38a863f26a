// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uniform/config.hpp"
#include "uniform/feature_consensus.hpp"
#include "uniform/student.hpp"
#include "uniform/teacher_bank.hpp"

namespace uniform {

/// Everything that is trained: the student plus one adapter per teacher,
/// adapters in bank order.
struct Model {
  StudentModel student;
  std::vector<TeacherAdapter> adapters;

  /// Student init is seeded from the run seed alone; each adapter from the
  /// run seed and its teacher id, so initialization ignores teacher order.
  static Model create(const TrainingSet& data, const TrainConfig& config);

  void zero_grads();
  std::vector<ParamRef> params();
  std::size_t num_parameters();
};

struct LossBreakdown {
  double logit = 0.0;
  double feature = 0.0;
  double rec = 0.0;
  double total = 0.0;
  bool clamped = false;
};

/// Per-sample objective for the configured method. Gradients, scaled by
/// `weight`, accumulate into `model`.
LossBreakdown sample_loss(std::size_t sample, const TrainingSet& data, Model& model, const TrainConfig& config,
                          double weight = 1.0);

namespace detail {
/// Shared feature + logit transfer pipeline. With `voting` it is UNIFORM
/// (sign-voted feature target, pseudo-class decoupled logit loss); without,
/// it is the averaging baseline.
LossBreakdown transfer_sample_loss(std::size_t sample, const TrainingSet& data, Model& model, const TrainConfig& config,
                                   double weight, bool voting);
}  // namespace detail

/// Batch objective: each component is the mean over samples. Per-sample
/// gradients are reduced in sample order, so results do not depend on the
/// number of worker threads.
class BatchObjective {
 public:
  BatchObjective(const TrainingSet& data, const TrainConfig& config, std::size_t threads = 1);

  /// Overwrites the model's gradients with the batch-mean gradient.
  LossBreakdown evaluate(std::span<const std::size_t> batch, Model& model);

 private:
  const TrainingSet& data_;
  TrainConfig config_;
  std::size_t threads_;
  std::vector<Vec> slots_;
  std::vector<LossBreakdown> losses_;
};

/// Single-threaded convenience over BatchObjective.
LossBreakdown total_loss(std::span<const std::size_t> batch, const TrainingSet& data, Model& model,
                         const TrainConfig& config);

/// Worker count: UNIFORM_THREADS if set, else hardware concurrency, capped by
/// `requested` when non-zero.
std::size_t resolve_threads(std::size_t requested = 0);

}  // namespace uniform
