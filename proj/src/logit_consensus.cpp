// SPDX-License-Identifier: Apache-2.0
#include "uniform/logit_consensus.hpp"

#include <algorithm>
#include <cmath>

namespace uniform {
namespace {

void check_inputs(std::span<const Vec> projected, std::span<const TeacherSubsetMap> subsets, std::size_t C,
                  const char* op) {
  if (projected.empty()) throw Error(std::string(op) + ": no predictive teachers");
  if (projected.size() != subsets.size()) throw Error(std::string(op) + ": one subset map per teacher required");
  for (std::size_t i = 0; i < projected.size(); ++i) {
    if (projected[i].size() != C) throw Error(std::string(op) + ": projected probabilities must span the union space");
    subsets[i].validate(C);
  }
}

}  // namespace

PseudoVote vote_pseudo_class(std::span<const Vec> projected, std::span<const TeacherSubsetMap> subsets,
                             std::size_t C) {
  check_inputs(projected, subsets, C, "vote_pseudo_class");
  PseudoVote v;
  v.vote_fractions.assign(C, 0.0);
  std::vector<std::size_t> counts(C, 0);
  for (std::size_t i = 0; i < projected.size(); ++i) {
    const auto& sub = subsets[i].subset;
    std::size_t best = sub.front();
    for (std::size_t c : sub) {
      if (projected[i][c] > projected[i][best]) best = c;
    }
    v.teacher_votes.push_back(best);
    ++counts[best];
  }
  const double n = static_cast<double>(projected.size());
  for (std::size_t c = 0; c < C; ++c) v.vote_fractions[c] = static_cast<double>(counts[c]) / n;
  v.pseudo_class = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  return v;
}

AveragedProbs average_teacher_probs(std::span<const Vec> projected, std::span<const TeacherSubsetMap> subsets,
                                    std::size_t C) {
  check_inputs(projected, subsets, C, "average_teacher_probs");
  AveragedProbs out;
  out.coverage.assign(C, 0);
  Vec sum(C, 0.0);
  for (std::size_t i = 0; i < projected.size(); ++i) {
    for (std::size_t c : subsets[i].subset) {
      sum[c] += projected[i][c];
      ++out.coverage[c];
    }
  }
  out.p_hat.assign(C, 0.0);
  double total = 0.0;
  std::size_t covered = 0;
  for (std::size_t c = 0; c < C; ++c) {
    if (out.coverage[c] == 0) continue;
    ++covered;
    out.p_hat[c] = sum[c] / static_cast<double>(out.coverage[c]);
    total += out.p_hat[c];
  }
  if (covered == 0) throw Error("average_teacher_probs: no class is covered by any teacher");
  for (std::size_t c = 0; c < C; ++c) {
    if (out.coverage[c] == 0) continue;
    out.p_hat[c] = total > 0.0 ? out.p_hat[c] / total : 1.0 / static_cast<double>(covered);
  }
  return out;
}

Vec mean_teacher_probs(std::span<const Vec> projected) {
  if (projected.empty()) throw Error("mean_teacher_probs: no predictive teachers");
  const std::size_t C = projected.front().size();
  Vec out(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    double sum = 0.0;
    for (const auto& p : projected) sum += p.at(c);
    out[c] = sum / static_cast<double>(projected.size());
  }
  double total = 0.0;
  for (double v : out) total += v;
  if (total <= 0.0) throw Error("mean_teacher_probs: teachers carry no probability mass");
  for (double& v : out) v /= total;
  return out;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

LogitLoss decoupled_logit_loss(std::span<const double> p_student, std::span<const double> p_hat, std::size_t c_hat,
                               double alpha1, double alpha2, LogitSign sign) {
  if (p_student.size() != p_hat.size() || p_student.empty()) throw Error("decoupled_logit_loss: dimension mismatch");
  if (c_hat >= p_hat.size()) throw Error("decoupled_logit_loss: pseudo-class out of range");
  LogitLoss out;
  out.entropy = entropy(p_hat);
  out.grad_p.assign(p_student.size(), 0.0);
  out.log_coefficients.assign(p_student.size(), 0.0);
  // Cross terms enter with a negative sign in the corrected form.
  const double direction = sign == LogitSign::corrected ? -1.0 : 1.0;
  double cross = 0.0;
  for (std::size_t c = 0; c < p_student.size(); ++c) {
    if (p_hat[c] == 0.0) continue;
    const double w = (c == c_hat ? alpha1 : alpha2) * p_hat[c];
    double p = p_student[c];
    if (p < kProbFloor) {
      p = kProbFloor;
      out.clamped = true;
    }
    cross += w * std::log(p);
    out.grad_p[c] = direction * w / p;
    out.log_coefficients[c] = direction * w;
  }
  out.value = out.entropy + direction * cross;
  return out;
}

LogitLoss cross_entropy(std::span<const double> p_student, std::span<const double> target) {
  if (p_student.size() != target.size() || p_student.empty()) throw Error("cross_entropy: dimension mismatch");
  LogitLoss out;
  out.grad_p.assign(p_student.size(), 0.0);
  out.log_coefficients.assign(p_student.size(), 0.0);
  for (std::size_t c = 0; c < p_student.size(); ++c) {
    if (target[c] == 0.0) continue;
    double p = p_student[c];
    if (p < kProbFloor) {
      p = kProbFloor;
      out.clamped = true;
    }
    out.value -= target[c] * std::log(p);
    out.grad_p[c] = -target[c] / p;
    out.log_coefficients[c] = -target[c];
  }
  return out;
}

Vec logit_grad(const LogitLoss& loss, std::span<const double> p, double temperature) {
  if (loss.log_coefficients.size() != p.size()) throw Error("logit_grad: dimension mismatch");
  double total = 0.0;
  for (double w : loss.log_coefficients) total += w;
  Vec g(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) g[j] = (loss.log_coefficients[j] - p[j] * total) / temperature;
  return g;
}

}  // namespace uniform
