// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uniform/config.hpp"
#include "uniform/label_space.hpp"
#include "uniform/objective.hpp"
#include "uniform/teacher_bank.hpp"

namespace uniform {

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double logit = 0.0;
  double feature = 0.0;
  double rec = 0.0;
  double total = 0.0;
};

struct TrainReport {
  TrainConfig config;
  std::vector<EpochLog> epochs;
  std::optional<Metrics> final_metrics;  // on the training manifest's labels, when present
  std::size_t clamped_steps = 0;
  double wall_clock_seconds = 0.0;
};

struct TrainOptions {
  std::size_t threads = 0;  // 0: UNIFORM_THREADS or hardware concurrency
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
  Model model;
  TrainReport report;
};

/// Minibatch training of student and adapters. Deterministic given the
/// config seed: init, per-epoch shuffling and optimizer are all seeded.
/// Throws if any loss component becomes non-finite.
TrainResult train(const TrainingSet& data, const TrainConfig& config, const TrainOptions& options = {});

/// Loads the manifest, trains, writes the checkpoint to `out_dir` and, when
/// the manifest has labels, records training-set metrics in the report. The
/// returned model is rounded to float32, exactly as stored.
TrainResult train_to_checkpoint(const std::filesystem::path& manifest_path, const TrainConfig& config,
                                 const std::filesystem::path& out_dir, const TrainOptions& options = {});

Metrics evaluate_student(const StudentModel& student, const DenseMatrix& inputs, std::span<const std::size_t> labels,
                         const UnionLabelSpace& space);

std::vector<std::size_t> predict_all(const StudentModel& student, const DenseMatrix& inputs);

/// Evaluates a saved checkpoint on a manifest that carries labels.
Metrics evaluate(const std::filesystem::path& checkpoint_dir, const std::filesystem::path& manifest_path);

// Checkpoint directory: params.bin (concatenated tensor dumps), index.json
// (names, shapes, byte offsets, architecture), config.json, report.json.
struct Checkpoint {
  Model model;
  TrainConfig config;
};

void save_checkpoint(const std::filesystem::path& dir, const Model& model, const TrainConfig& config);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

nlohmann::json metrics_to_json(const Metrics& metrics, const UnionLabelSpace& space);
Metrics metrics_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const TrainReport& report, const UnionLabelSpace& space);
TrainReport report_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace uniform
