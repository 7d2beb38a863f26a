// SPDX-License-Identifier: Apache-2.0
#include "uniform/inspect.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "uniform/logit_consensus.hpp"

namespace uniform {

SampleInspection inspect_sample(const TrainingSet& data, const Model& model, std::size_t sample) {
  if (sample >= data.inputs.rows()) {
    throw Error("sample " + std::to_string(sample) + " out of range (" + std::to_string(data.inputs.rows()) +
                " samples)");
  }
  const auto& teachers = data.bank.teachers;
  if (teachers.empty()) throw Error("inspect: the bank has no teachers");
  if (model.adapters.size() != teachers.size()) throw Error("inspect: checkpoint adapters do not match the manifest");

  SampleInspection out;
  out.sample = sample;
  out.num_teachers = teachers.size();
  std::vector<Vec> encoded;
  for (std::size_t i = 0; i < teachers.size(); ++i) {
    if (model.adapters[i].teacher_id != teachers[i].id) {
      throw Error("inspect: checkpoint adapter '" + model.adapters[i].teacher_id + "' does not match teacher '" +
                  teachers[i].id + "'");
    }
    encoded.push_back(encode(model.adapters[i], teachers[i].features.row(sample)));
  }
  const std::size_t D = encoded.front().size();
  out.sign_histogram.assign(D, {0, 0, 0});
  for (const auto& e : encoded) {
    for (std::size_t d = 0; d < D; ++d) ++out.sign_histogram[d][static_cast<std::size_t>(sgn(e[d]) + 1)];
  }
  const ConsensusResult consensus = aggregate_voted(encoded, vote_signs(encoded));
  out.voted_signs = consensus.s;
  out.support = consensus.support_count;
  out.x_hat = consensus.x_hat;
  out.mean = mean_features(encoded);
  for (std::size_t d = 0; d < D; ++d) {
    out.dropped_fraction.push_back(1.0 - static_cast<double>(consensus.support_count[d]) /
                                             static_cast<double>(teachers.size()));
  }

  std::vector<Vec> projected;
  std::vector<TeacherSubsetMap> subsets;
  std::vector<std::string> ids;
  for (const auto& t : teachers) {
    if (!t.predictive()) continue;
    projected.push_back(project_probs(t.probs->row(sample), *t.subset, data.space));
    subsets.push_back(*t.subset);
    ids.push_back(t.id);
  }
  const std::size_t C = data.space.num_classes();
  out.vote_histogram.assign(C, 0);
  if (projected.empty()) return out;
  const PseudoVote vote = vote_pseudo_class(projected, subsets, C);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.teacher_votes.emplace_back(ids[i], vote.teacher_votes[i]);
    ++out.vote_histogram[vote.teacher_votes[i]];
  }
  out.pseudo_class = vote.pseudo_class;
  const AveragedProbs avg = average_teacher_probs(projected, subsets, C);
  std::vector<std::size_t> order(C);
  for (std::size_t c = 0; c < C; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return avg.p_hat[a] > avg.p_hat[b]; });
  for (std::size_t k = 0; k < std::min<std::size_t>(5, C); ++k) out.p_hat_top.emplace_back(order[k], avg.p_hat[order[k]]);
  return out;
}

std::string format_inspection(const SampleInspection& in, const UnionLabelSpace& space) {
  std::ostringstream os;
  char buf[160];
  os << "sample " << in.sample << ": " << in.num_teachers << " teachers\n";
  os << "feature consensus\n";
  os << " dim     -     0     +   s  support  dropped    x_hat     mean\n";
  for (std::size_t d = 0; d < in.voted_signs.size(); ++d) {
    const auto& h = in.sign_histogram[d];
    const char s = in.voted_signs[d] > 0 ? '+' : (in.voted_signs[d] < 0 ? '-' : '0');
    std::snprintf(buf, sizeof buf, "%4zu %5zu %5zu %5zu   %c  %7zu  %7.3f %8.4f %8.4f\n", d, h[0], h[1], h[2], s,
                  in.support[d], in.dropped_fraction[d], in.x_hat[d], in.mean[d]);
    os << buf;
  }
  os << "logit consensus\n";
  if (in.teacher_votes.empty()) {
    os << "  no predictive teachers\n";
    return os.str();
  }
  for (const auto& [id, c] : in.teacher_votes) os << "  " << id << " -> " << space.class_label(c) << '\n';
  os << "  votes:";
  for (std::size_t c = 0; c < in.vote_histogram.size(); ++c) {
    if (in.vote_histogram[c] > 0) os << ' ' << space.class_label(c) << '=' << in.vote_histogram[c];
  }
  os << "\n  pseudo-class: " << space.class_label(in.pseudo_class) << '\n';
  os << "  p_hat top-" << in.p_hat_top.size() << ":\n";
  for (const auto& [c, p] : in.p_hat_top) {
    std::snprintf(buf, sizeof buf, "    %-16s %.4f\n", space.class_label(c).c_str(), p);
    os << buf;
  }
  return os.str();
}

}  // namespace uniform
