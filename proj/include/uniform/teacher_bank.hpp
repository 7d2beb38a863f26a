// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uniform/label_space.hpp"
#include "uniform/matrix.hpp"

namespace uniform {

enum class TeacherKind { predictive, descriptive };

std::string to_string(TeacherKind kind);
TeacherKind teacher_kind_from_string(const std::string& text);

struct TeacherEntry {
  std::string id;
  TeacherKind kind = TeacherKind::descriptive;
  std::size_t feature_dim = 0;
  std::string feature_file;
  std::optional<std::string> probs_file;
  std::optional<std::vector<std::size_t>> subset;
};

/// JSON document tying inputs, optional labels and teacher dumps together.
/// Relative paths resolve against the manifest's directory.
struct Manifest {
  int version = 1;
  std::vector<DatasetClasses> datasets;
  std::string input_file;
  std::optional<std::string> labels_file;
  std::vector<TeacherEntry> teachers;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
  static Manifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

struct TeacherRecord {
  std::string id;
  TeacherKind kind = TeacherKind::descriptive;
  DenseMatrix features;               // n_samples x feature_dim
  std::optional<DenseMatrix> probs;   // n_samples x |subset|, predictive only
  std::optional<TeacherSubsetMap> subset;

  bool predictive() const noexcept { return kind == TeacherKind::predictive; }
  std::size_t feature_dim() const noexcept { return features.cols(); }
};

/// Teachers sorted by id, so consumers never depend on manifest order.
struct TeacherBank {
  std::vector<TeacherRecord> teachers;
  std::size_t n_samples = 0;

  std::size_t num_predictive() const;
  std::size_t num_descriptive() const;
};

/// Everything a training run may see. Ground-truth labels are deliberately
/// absent.
struct TrainingSet {
  UnionLabelSpace space;
  DenseMatrix inputs;  // n_samples x D_in
  TeacherBank bank;
};

/// Deferred access to the label dump; only evaluation code reads it.
class LabelHandle {
 public:
  explicit LabelHandle(std::filesystem::path path) : path_(std::move(path)) {}
  const std::filesystem::path& path() const noexcept { return path_; }
  /// Reads and validates labels as integer class indices in [0, C).
  std::vector<std::size_t> read(const UnionLabelSpace& space, std::size_t expected_samples) const;

 private:
  std::filesystem::path path_;
};

struct LoadedBank {
  TrainingSet data;
  std::optional<LabelHandle> labels;
};

/// Loads and cross-validates every file referenced by the manifest.
LoadedBank load_bank(const std::filesystem::path& manifest_path);

}  // namespace uniform
