// SPDX-License-Identifier: Apache-2.0
#include "uniform/feature_consensus.hpp"

#include <cmath>

namespace uniform {
namespace {

std::size_t common_dim_of(std::span<const Vec> encoded, const char* op) {
  if (encoded.empty()) throw Error(std::string(op) + ": no teachers");
  const std::size_t D = encoded.front().size();
  for (std::size_t i = 1; i < encoded.size(); ++i) {
    if (encoded[i].size() != D) {
      throw Error(std::string(op) + ": teacher " + std::to_string(i) + " has dim " + std::to_string(encoded[i].size()) +
                  ", expected " + std::to_string(D));
    }
  }
  return D;
}

}  // namespace

TeacherAdapter TeacherAdapter::create(std::string teacher_id, std::size_t feature_dim, std::size_t common_dim,
                                      Rng& rng) {
  TeacherAdapter a;
  a.teacher_id = std::move(teacher_id);
  a.encoder = AffineBlock::glorot(rng, feature_dim, common_dim);
  a.decoder = AffineBlock::glorot(rng, common_dim, feature_dim);
  return a;
}

void TeacherAdapter::zero_grads() {
  encoder.zero_grads();
  decoder.zero_grads();
}

void TeacherAdapter::collect(std::vector<ParamRef>& out) {
  encoder.collect("adapter." + teacher_id + ".encoder", out);
  decoder.collect("adapter." + teacher_id + ".decoder", out);
}

Vec encode(const TeacherAdapter& adapter, std::span<const double> feat) {
  if (feat.size() != adapter.feature_dim()) {
    throw Error("encode: teacher '" + adapter.teacher_id + "' expects dim " + std::to_string(adapter.feature_dim()) +
                ", got " + std::to_string(feat.size()));
  }
  return adapter.encoder.forward(feat);
}

double recon_loss(std::span<TeacherAdapter> adapters, std::span<const std::span<const double>> teacher_feats,
                  double weight) {
  if (adapters.size() != teacher_feats.size()) throw Error("recon_loss: one feature vector per adapter required");
  double total = 0.0;
  for (std::size_t i = 0; i < adapters.size(); ++i) {
    auto& a = adapters[i];
    const auto x = teacher_feats[i];
    const Vec z = encode(a, x);
    Vec r = a.decoder.forward(z);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= x[k];
    const double norm = norm2(r);
    total += norm;
    if (weight == 0.0 || norm == 0.0) continue;
    for (double& v : r) v *= weight / norm;
    const Vec gz = a.decoder.backward(z, r);
    a.encoder.backward(x, gz);
  }
  return total;
}

std::vector<int> vote_signs(std::span<const Vec> encoded) {
  const std::size_t D = common_dim_of(encoded, "vote_signs");
  std::vector<long> tally(D, 0);
  for (const auto& e : encoded) {
    for (std::size_t d = 0; d < D; ++d) tally[d] += sgn(e[d]);
  }
  std::vector<int> s(D);
  for (std::size_t d = 0; d < D; ++d) s[d] = (tally[d] > 0) - (tally[d] < 0);
  return s;
}

ConsensusResult aggregate_voted(std::span<const Vec> encoded, std::span<const int> s) {
  const std::size_t D = common_dim_of(encoded, "aggregate_voted");
  if (s.size() != D) throw Error("aggregate_voted: vote vector has dim " + std::to_string(s.size()) + ", expected " + std::to_string(D));
  ConsensusResult r;
  r.s.assign(s.begin(), s.end());
  r.x_hat.assign(D, 0.0);
  r.support_count.assign(D, 0);
  for (std::size_t d = 0; d < D; ++d) {
    if (s[d] == 0) continue;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& e : encoded) {
      if (sgn(e[d]) == s[d]) {
        sum += e[d];
        ++count;
      }
    }
    r.support_count[d] = count;
    if (count > 0) r.x_hat[d] = sum / static_cast<double>(count);
  }
  return r;
}

Vec mean_features(std::span<const Vec> encoded) {
  const std::size_t D = common_dim_of(encoded, "mean_features");
  Vec out(D, 0.0);
  for (std::size_t d = 0; d < D; ++d) {
    double sum = 0.0;
    for (const auto& e : encoded) sum += e[d];
    out[d] = sum / static_cast<double>(encoded.size());
  }
  return out;
}

std::vector<Vec> consensus_backward(std::span<const Vec> encoded, const ConsensusResult& result,
                                    std::span<const double> grad_x_hat) {
  const std::size_t D = result.x_hat.size();
  std::vector<Vec> grads(encoded.size(), Vec(D, 0.0));
  for (std::size_t d = 0; d < D; ++d) {
    if (result.support_count[d] == 0) continue;
    const double g = grad_x_hat[d] / static_cast<double>(result.support_count[d]);
    for (std::size_t i = 0; i < encoded.size(); ++i) {
      if (sgn(encoded[i][d]) == result.s[d]) grads[i][d] = g;
    }
  }
  return grads;
}

std::vector<Vec> mean_backward(std::size_t num_teachers, std::span<const double> grad_mean) {
  Vec g(grad_mean.begin(), grad_mean.end());
  for (double& v : g) v /= static_cast<double>(num_teachers);
  return std::vector<Vec>(num_teachers, g);
}

std::string to_string(FeatureMetric metric) { return metric == FeatureMetric::mse ? "mse" : "radio"; }

FeatureMetric feature_metric_from_string(const std::string& text) {
  if (text == "mse") return FeatureMetric::mse;
  if (text == "radio") return FeatureMetric::radio;
  throw Error("unknown feature metric '" + text + "' (expected mse or radio)");
}

FeatureLoss feature_loss(std::span<const double> x, std::span<const double> t, FeatureMetric metric) {
  if (x.size() != t.size() || x.empty()) {
    throw Error("feature_loss: dimension mismatch (" + std::to_string(x.size()) + " vs " + std::to_string(t.size()) + ")");
  }
  const std::size_t D = x.size();
  const double inv_d = 1.0 / static_cast<double>(D);
  FeatureLoss out;
  out.grad_student.assign(D, 0.0);
  out.grad_target.assign(D, 0.0);

  if (metric == FeatureMetric::mse) {
    for (std::size_t d = 0; d < D; ++d) {
      const double delta = x[d] - t[d];
      out.value += delta * delta * inv_d;
      out.grad_student[d] = 2.0 * delta * inv_d;
      out.grad_target[d] = -out.grad_student[d];
    }
    return out;
  }

  for (std::size_t d = 0; d < D; ++d) {
    const double delta = x[d] - t[d];
    const double a = std::abs(delta);
    out.value += (a < 1.0 ? 0.5 * delta * delta : a - 0.5) * inv_d;
    const double g = (a < 1.0 ? delta : static_cast<double>(sgn(delta))) * inv_d;
    out.grad_student[d] = g;
    out.grad_target[d] = -g;
  }
  const double nx = norm2(x);
  const double nt = norm2(t);
  if (nx == 0.0 || nt == 0.0) {
    out.value += 1.0;
    return out;
  }
  const double cos = dot(x, t) / (nx * nt);
  out.value += 1.0 - cos;
  for (std::size_t d = 0; d < D; ++d) {
    out.grad_student[d] -= t[d] / (nx * nt) - cos * x[d] / (nx * nx);
    out.grad_target[d] -= x[d] / (nx * nt) - cos * t[d] / (nt * nt);
  }
  return out;
}

}  // namespace uniform
