// SPDX-License-Identifier: Apache-2.0
#include "uniform/label_space.hpp"

#include <set>

namespace uniform {

UnionLabelSpace UnionLabelSpace::build(std::span<const DatasetClasses> datasets) {
  if (datasets.empty()) throw Error("build_union: at least one dataset is required");
  UnionLabelSpace space;
  std::set<std::string> names;
  std::size_t offset = 0;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto& ds = datasets[d];
    if (!names.insert(ds.name).second) throw Error("build_union: duplicate dataset name '" + ds.name + "'");
    if (ds.classes.empty()) throw Error("build_union: dataset '" + ds.name + "' has no classes");
    space.datasets_.push_back(ds);
    space.offsets_.push_back(offset);
    space.dataset_of_.insert(space.dataset_of_.end(), ds.classes.size(), d);
    offset += ds.classes.size();
  }
  return space;
}

std::string UnionLabelSpace::class_label(std::size_t class_index) const {
  const std::size_t d = dataset_of(class_index);
  return datasets_[d].name + "/" + datasets_[d].classes[class_index - offsets_[d]];
}

void TeacherSubsetMap::validate(std::size_t num_classes) const {
  if (subset.empty()) throw Error("teacher '" + teacher_id + "': empty class subset");
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (subset[k] >= num_classes) {
      throw Error("teacher '" + teacher_id + "': subset index " + std::to_string(subset[k]) +
                  " outside union space of " + std::to_string(num_classes) + " classes");
    }
    if (k > 0 && subset[k] <= subset[k - 1]) {
      throw Error("teacher '" + teacher_id + "': subset indices must be strictly increasing");
    }
  }
}

Vec project_probs(std::span<const double> teacher_probs, const TeacherSubsetMap& map,
                  const UnionLabelSpace& space) {
  if (teacher_probs.size() != map.subset.size()) {
    throw Error("project_probs: teacher '" + map.teacher_id + "' gives " + std::to_string(teacher_probs.size()) +
                " probabilities for a subset of " + std::to_string(map.subset.size()));
  }
  Vec out(space.num_classes(), 0.0);
  for (std::size_t k = 0; k < map.subset.size(); ++k) out.at(map.subset[k]) = teacher_probs[k];
  return out;
}

Metrics compute_metrics(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                        const UnionLabelSpace& space) {
  if (predictions.empty()) throw Error("metrics: empty input");
  if (predictions.size() != labels.size()) throw Error("metrics: prediction/label length mismatch");
  const std::size_t C = space.num_classes();
  std::vector<std::size_t> class_total(C, 0), class_correct(C, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= C || predictions[i] >= C) throw Error("metrics: class index out of range");
    ++class_total[labels[i]];
    if (predictions[i] == labels[i]) ++class_correct[labels[i]];
  }

  Metrics m;
  const std::size_t K = space.num_datasets();
  std::vector<std::size_t> ds_correct(K, 0);
  m.per_dataset_count.assign(K, 0);
  m.per_class_acc.assign(C, std::nullopt);
  double class_sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    const std::size_t d = space.dataset_of(c);
    m.per_dataset_count[d] += class_total[c];
    ds_correct[d] += class_correct[c];
    if (class_total[c] == 0) {
      ++m.classes_excluded;
      continue;
    }
    const double acc = static_cast<double>(class_correct[c]) / static_cast<double>(class_total[c]);
    m.per_class_acc[c] = acc;
    class_sum += acc;
    ++m.classes_evaluated;
  }
  m.avg_c = class_sum / static_cast<double>(m.classes_evaluated);

  double ds_sum = 0.0;
  std::size_t ds_used = 0;
  m.per_dataset_acc.assign(K, std::nullopt);
  for (std::size_t d = 0; d < K; ++d) {
    if (m.per_dataset_count[d] == 0) continue;
    const double acc = static_cast<double>(ds_correct[d]) / static_cast<double>(m.per_dataset_count[d]);
    m.per_dataset_acc[d] = acc;
    ds_sum += acc;
    ++ds_used;
  }
  m.avg_d = ds_sum / static_cast<double>(ds_used);
  return m;
}

}  // namespace uniform
