// SPDX-License-Identifier: Apache-2.0
#include "uniform/baselines.hpp"

#include "uniform/logit_consensus.hpp"

namespace uniform {

std::vector<std::size_t> kd_compatible_teachers(const TeacherBank& bank, std::size_t feature_dim) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bank.teachers.size(); ++i) {
    const auto& t = bank.teachers[i];
    if (t.predictive() && t.feature_dim() == feature_dim) out.push_back(i);
  }
  return out;
}

LossBreakdown kd_sample_loss(std::size_t sample, const TrainingSet& data, StudentModel& student,
                             const TrainConfig& config, double weight) {
  const auto compatible = kd_compatible_teachers(data.bank, student.feature_dim());
  if (compatible.empty()) {
    throw Error("kd: no predictive teacher has feature dim " + std::to_string(student.feature_dim()) +
                "; use method cflplus for heterogeneous teachers");
  }
  std::vector<Vec> feats;
  std::vector<Vec> projected;
  for (std::size_t i : compatible) {
    const auto& t = data.bank.teachers[i];
    feats.emplace_back(t.features.row(sample).begin(), t.features.row(sample).end());
    projected.push_back(project_probs(t.probs->row(sample), *t.subset, data.space));
  }
  const Vec x_bar = mean_features(feats);
  const Vec p_bar = mean_teacher_probs(projected);

  LossBreakdown out;
  const MlpOutput fwd = student.student_features(data.inputs.row(sample));
  const Vec& x = fwd.output;
  Vec z = student.classifier.forward(x);
  for (double& v : z) v /= student.temperature;
  const Vec p = softmax(z);

  const FeatureLoss fl = feature_loss(x, x_bar, config.feature_metric);
  const LogitLoss ll = cross_entropy(p, p_bar);
  out.feature = fl.value;
  out.logit = ll.value;
  out.clamped = ll.clamped;

  Vec grad_z = logit_grad(ll, p, student.temperature);
  for (double& v : grad_z) v *= weight;
  Vec grad_x = student.classifier.backward(x, grad_z);
  for (std::size_t d = 0; d < x.size(); ++d) grad_x[d] += weight * config.beta1 * fl.grad_student[d];
  student.features_backward(fwd.cache, grad_x);

  out.total = out.logit + config.beta1 * out.feature;
  return out;
}

LossBreakdown cflplus_sample_loss(std::size_t sample, const TrainingSet& data, Model& model,
                                  const TrainConfig& config, double weight) {
  return detail::transfer_sample_loss(sample, data, model, config, weight, false);
}

namespace {

LossBreakdown batch_loss(std::span<const std::size_t> batch, const TrainingSet& data, Model& model,
                         TrainConfig config, Method method) {
  config.method = method;
  return total_loss(batch, data, model, config);
}

}  // namespace

LossBreakdown kd_loss(std::span<const std::size_t> batch, const TrainingSet& data, Model& model,
                      const TrainConfig& config) {
  return batch_loss(batch, data, model, config, Method::kd);
}

LossBreakdown cflplus_loss(std::span<const std::size_t> batch, const TrainingSet& data, Model& model,
                           const TrainConfig& config) {
  return batch_loss(batch, data, model, config, Method::cflplus);
}

}  // namespace uniform
