// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uniform/matrix.hpp"

namespace uniform {

struct DatasetClasses {
  std::string name;
  std::vector<std::string> classes;

  bool operator==(const DatasetClasses&) const = default;
};

/// Disjoint concatenation of per-dataset class lists. Classes sharing a name
/// across datasets stay distinct. Immutable after construction.
class UnionLabelSpace {
 public:
  static UnionLabelSpace build(std::span<const DatasetClasses> datasets);

  std::size_t num_classes() const noexcept { return dataset_of_.size(); }
  std::size_t num_datasets() const noexcept { return datasets_.size(); }
  const std::vector<DatasetClasses>& datasets() const noexcept { return datasets_; }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }

  std::size_t dataset_of(std::size_t class_index) const { return dataset_of_.at(class_index); }
  std::size_t dataset_size(std::size_t dataset) const { return datasets_.at(dataset).classes.size(); }
  /// "dataset/class" label for display.
  std::string class_label(std::size_t class_index) const;

  bool operator==(const UnionLabelSpace&) const = default;

 private:
  std::vector<DatasetClasses> datasets_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> dataset_of_;
};

/// Union-space indices a teacher can predict, strictly increasing.
struct TeacherSubsetMap {
  std::string teacher_id;
  std::vector<std::size_t> subset;

  /// Throws unless indices are in [0, C), strictly increasing and non-empty.
  void validate(std::size_t num_classes) const;
};

/// Places subset probabilities at their union indices, zero elsewhere.
Vec project_probs(std::span<const double> teacher_probs, const TeacherSubsetMap& map,
                  const UnionLabelSpace& space);

struct Metrics {
  std::vector<std::optional<double>> per_dataset_acc;  // nullopt when the dataset has no samples
  std::vector<std::size_t> per_dataset_count;
  std::vector<std::optional<double>> per_class_acc;  // nullopt when the class has no samples
  double avg_d = 0.0;
  double avg_c = 0.0;
  std::size_t classes_evaluated = 0;
  std::size_t classes_excluded = 0;
};

/// Accuracy over the union space. A prediction counts only when it equals
/// the label exactly, so confusing a class with one from another dataset is
/// charged to the label's dataset. Classes absent from `labels` are left out
/// of avg_c; datasets absent from `labels` are left out of avg_d.
Metrics compute_metrics(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                        const UnionLabelSpace& space);

}  // namespace uniform
