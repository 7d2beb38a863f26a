// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uniform/label_space.hpp"
#include "uniform/matrix.hpp"

namespace uniform {

/// Probability floor applied before taking a logarithm.
inline constexpr double kProbFloor = 1e-300;

struct PseudoVote {
  std::size_t pseudo_class = 0;
  Vec vote_fractions;                     // over the union space
  std::vector<std::size_t> teacher_votes;  // each teacher's subset-restricted argmax
};

/// Each teacher votes for its argmax within its own subset; the pseudo-class
/// is the most voted class, lowest index on ties.
PseudoVote vote_pseudo_class(std::span<const Vec> projected_probs, std::span<const TeacherSubsetMap> subsets,
                             std::size_t num_classes);

struct AveragedProbs {
  Vec p_hat;
  std::vector<std::size_t> coverage;
};

/// Class-wise mean over the teachers covering each class, renormalized.
/// Falls back to uniform over covered classes when all raw mass is zero.
AveragedProbs average_teacher_probs(std::span<const Vec> projected_probs, std::span<const TeacherSubsetMap> subsets,
                                    std::size_t num_classes);

/// Plain mean over all teachers (uncovered classes count as zero), renormalized.
Vec mean_teacher_probs(std::span<const Vec> projected_probs);

/// -sum p log p with 0 log 0 = 0.
double entropy(std::span<const double> p);

/// `corrected` minimizes toward agreement; `as_printed` keeps the positive
/// cross-term sign and exists only for inspection.
enum class LogitSign { corrected, as_printed };

struct LogitLoss {
  double value = 0.0;
  double entropy = 0.0;
  Vec grad_p;           // w.r.t. the student probabilities
  Vec log_coefficients;  // value = constant + sum_c log_coefficients[c] * log p[c]
  bool clamped = false;  // some student probability hit kProbFloor
};

/// Gradient w.r.t. the logits z of p = softmax(z / temperature), using the
/// log-linear form of the loss so no probability is ever divided by.
Vec logit_grad(const LogitLoss& loss, std::span<const double> p_student, double temperature);

/// H(p_hat) - a1 p_hat[c] log p[c] - a2 sum_{j != c} p_hat[j] log p[j].
/// H(p_hat) carries no gradient.
LogitLoss decoupled_logit_loss(std::span<const double> p_student, std::span<const double> p_hat, std::size_t pseudo_class,
                               double alpha1, double alpha2, LogitSign sign = LogitSign::corrected);

/// -sum target log p, without the entropy constant.
LogitLoss cross_entropy(std::span<const double> p_student, std::span<const double> target);

}  // namespace uniform
