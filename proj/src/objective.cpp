// SPDX-License-Identifier: Apache-2.0
#include "uniform/objective.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

#include "uniform/baselines.hpp"
#include "uniform/logit_consensus.hpp"

namespace uniform {

Model Model::create(const TrainingSet& data, const TrainConfig& config) {
  config.validate();
  const Rng root(config.seed);
  Model m;
  Rng student_rng = root.fork("student");
  StudentShape shape;
  shape.input_dim = data.inputs.cols();
  shape.hidden = config.hidden;
  shape.feature_dim = config.common_dim;
  shape.num_classes = data.space.num_classes();
  shape.temperature = config.temperature;
  m.student = StudentModel::create(shape, student_rng);
  for (const auto& t : data.bank.teachers) {
    Rng rng = root.fork("adapter/" + t.id);
    m.adapters.push_back(TeacherAdapter::create(t.id, t.feature_dim(), config.common_dim, rng));
  }
  return m;
}

void Model::zero_grads() {
  student.zero_grads();
  for (auto& a : adapters) a.zero_grads();
}

std::vector<ParamRef> Model::params() {
  std::vector<ParamRef> out;
  student.collect(out);
  for (auto& a : adapters) a.collect(out);
  return out;
}

std::size_t Model::num_parameters() {
  std::size_t n = 0;
  for (const auto& p : params()) n += p.value.size();
  return n;
}

namespace detail {

LossBreakdown transfer_sample_loss(std::size_t sample, const TrainingSet& data, Model& model, const TrainConfig& config,
                                   double weight, bool voting) {
  const auto& teachers = data.bank.teachers;
  if (teachers.empty()) throw Error("total_loss: the bank has no teachers");
  if (model.adapters.size() != teachers.size()) throw Error("total_loss: adapters do not match bank teachers");
  const std::size_t C = data.space.num_classes();

  LossBreakdown out;
  auto& student = model.student;
  const MlpOutput fwd = student.student_features(data.inputs.row(sample));
  const Vec& x = fwd.output;
  Vec z = student.classifier.forward(x);
  for (double& v : z) v /= student.temperature;
  const Vec p = softmax(z);

  // Feature transfer in the common space.
  std::vector<std::span<const double>> feats;
  std::vector<Vec> encoded;
  feats.reserve(teachers.size());
  encoded.reserve(teachers.size());
  for (std::size_t i = 0; i < teachers.size(); ++i) {
    feats.push_back(teachers[i].features.row(sample));
    encoded.push_back(encode(model.adapters[i], feats.back()));
  }
  ConsensusResult consensus;
  Vec target;
  if (voting) {
    consensus = aggregate_voted(encoded, vote_signs(encoded));
    target = consensus.x_hat;
  } else {
    target = mean_features(encoded);
  }
  const FeatureLoss fl = feature_loss(x, target, config.feature_metric);
  out.feature = fl.value;

  Vec grad_x(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) grad_x[d] = weight * config.beta1 * fl.grad_student[d];
  if (!config.detach_xhat && config.beta1 != 0.0 && weight != 0.0) {
    Vec g = fl.grad_target;
    for (double& v : g) v *= weight * config.beta1;
    const auto per_teacher = voting ? consensus_backward(encoded, consensus, g) : mean_backward(encoded.size(), g);
    for (std::size_t i = 0; i < teachers.size(); ++i) model.adapters[i].encoder.backward(feats[i], per_teacher[i]);
  }
  out.rec = recon_loss(model.adapters, feats, weight * config.beta2);

  // Logit transfer over the union space.
  std::vector<Vec> projected;
  std::vector<TeacherSubsetMap> subsets;
  for (const auto& t : teachers) {
    if (!t.predictive()) continue;
    projected.push_back(project_probs(t.probs->row(sample), *t.subset, data.space));
    subsets.push_back(*t.subset);
  }
  if (projected.empty()) throw Error("total_loss: no predictive teachers, so the logit loss is undefined");
  LogitLoss ll;
  if (voting) {
    const PseudoVote vote = vote_pseudo_class(projected, subsets, C);
    const AveragedProbs avg = average_teacher_probs(projected, subsets, C);
    ll = decoupled_logit_loss(p, avg.p_hat, vote.pseudo_class, config.alpha1, config.alpha2, config.logit_sign);
  } else {
    const Vec p_bar = mean_teacher_probs(projected);
    ll = cross_entropy(p, p_bar);
    ll.entropy = entropy(p_bar);
    ll.value += ll.entropy;
  }
  out.logit = ll.value;
  out.clamped = ll.clamped;

  Vec grad_z = logit_grad(ll, p, student.temperature);
  for (double& v : grad_z) v *= weight;
  const Vec gx_cls = student.classifier.backward(x, grad_z);
  for (std::size_t d = 0; d < x.size(); ++d) grad_x[d] += gx_cls[d];
  student.features_backward(fwd.cache, grad_x);

  out.total = out.logit + config.beta1 * out.feature + config.beta2 * out.rec;
  return out;
}

}  // namespace detail

LossBreakdown sample_loss(std::size_t sample, const TrainingSet& data, Model& model, const TrainConfig& config,
                          double weight) {
  if (sample >= data.inputs.rows()) throw Error("sample index " + std::to_string(sample) + " out of range");
  switch (config.method) {
    case Method::uniform: return detail::transfer_sample_loss(sample, data, model, config, weight, true);
    case Method::cflplus: return cflplus_sample_loss(sample, data, model, config, weight);
    case Method::kd: return kd_sample_loss(sample, data, model.student, config, weight);
  }
  throw Error("unknown method");
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UNIFORM_THREADS"); env != nullptr && *env != '\0') {
    try {
      n = std::max<std::size_t>(1, std::stoul(env));
    } catch (const std::exception&) {
      throw Error(std::string("UNIFORM_THREADS must be a positive integer, got '") + env + "'");
    }
  }
  if (requested > 0) n = std::min(n, requested);
  return n;
}

BatchObjective::BatchObjective(const TrainingSet& data, const TrainConfig& config, std::size_t threads)
    : data_(data), config_(config), threads_(std::max<std::size_t>(1, threads)) {
  config_.validate();
}

LossBreakdown BatchObjective::evaluate(std::span<const std::size_t> batch, Model& model) {
  if (batch.empty()) throw Error("total_loss: empty batch");
  const std::size_t B = batch.size();
  if (slots_.size() < B) slots_.resize(B);
  losses_.assign(B, {});

  auto run_samples = [&](Model& worker, std::size_t first, std::size_t stride) {
    const auto params = worker.params();
    for (std::size_t k = first; k < B; k += stride) {
      worker.zero_grads();
      losses_[k] = sample_loss(batch[k], data_, worker, config_, 1.0);
      auto& slot = slots_[k];
      slot.clear();
      for (const auto& p : params) slot.insert(slot.end(), p.grad.begin(), p.grad.end());
    }
  };

  const std::size_t workers = std::min(threads_, B);
  if (workers == 1) {
    run_samples(model, 0, 1);
  } else {
    std::vector<Model> copies(workers, model);
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            run_samples(copies[w], w, workers);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const double inv_b = 1.0 / static_cast<double>(B);
  LossBreakdown mean;
  for (const auto& l : losses_) {
    mean.logit += l.logit;
    mean.feature += l.feature;
    mean.rec += l.rec;
    mean.clamped = mean.clamped || l.clamped;
  }
  mean.logit *= inv_b;
  mean.feature *= inv_b;
  mean.rec *= inv_b;
  mean.total = mean.logit + config_.beta1 * mean.feature + config_.beta2 * mean.rec;

  model.zero_grads();
  const auto params = model.params();
  std::size_t offset = 0;
  for (const auto& p : params) {
    for (std::size_t k = 0; k < B; ++k) {
      const double* src = slots_[k].data() + offset;
      for (std::size_t i = 0; i < p.grad.size(); ++i) p.grad[i] += src[i];
    }
    for (double& g : p.grad) g *= inv_b;
    offset += p.grad.size();
  }
  return mean;
}

LossBreakdown total_loss(std::span<const std::size_t> batch, const TrainingSet& data, Model& model,
                         const TrainConfig& config) {
  BatchObjective objective(data, config, 1);
  return objective.evaluate(batch, model);
}

}  // namespace uniform
