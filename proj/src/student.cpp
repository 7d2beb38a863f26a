// SPDX-License-Identifier: Apache-2.0
#include "uniform/student.hpp"

namespace uniform {

StudentModel StudentModel::create(const StudentShape& shape, Rng& rng) {
  if (shape.input_dim == 0 || shape.feature_dim == 0 || shape.num_classes == 0) {
    throw Error("StudentModel: dimensions must be positive");
  }
  if (!(shape.temperature > 0.0)) throw Error("StudentModel: temperature must be positive");
  StudentModel m;
  std::size_t in = shape.input_dim;
  for (std::size_t width : shape.hidden) {
    if (width == 0) throw Error("StudentModel: hidden width must be positive");
    m.feature_net.push_back(AffineBlock::glorot(rng, in, width));
    in = width;
  }
  m.feature_net.push_back(AffineBlock::glorot(rng, in, shape.feature_dim));
  m.classifier = AffineBlock::glorot(rng, shape.feature_dim, shape.num_classes);
  m.temperature = shape.temperature;
  return m;
}

StudentShape StudentModel::shape() const {
  StudentShape s;
  s.input_dim = input_dim();
  for (std::size_t k = 0; k + 1 < feature_net.size(); ++k) s.hidden.push_back(feature_net[k].out_dim());
  s.feature_dim = feature_dim();
  s.num_classes = num_classes();
  s.temperature = temperature;
  return s;
}

MlpOutput StudentModel::student_features(std::span<const double> input) const {
  if (input.size() != input_dim()) {
    throw Error("student_features: input dim " + std::to_string(input.size()) + " != " + std::to_string(input_dim()));
  }
  return mlp_forward(feature_net, Activation::relu, input);
}

Vec StudentModel::classify(std::span<const double> features) const {
  Vec z = classifier.forward(features);
  for (double& v : z) v /= temperature;
  return softmax(z);
}

Vec StudentModel::features_backward(const MlpCache& cache, std::span<const double> grad_features) {
  return mlp_backward(feature_net, Activation::relu, cache, grad_features);
}

void StudentModel::zero_grads() {
  for (auto& b : feature_net) b.zero_grads();
  classifier.zero_grads();
}

void StudentModel::collect(std::vector<ParamRef>& out) {
  for (std::size_t k = 0; k < feature_net.size(); ++k) feature_net[k].collect("student.feature." + std::to_string(k), out);
  classifier.collect("student.classifier", out);
}

std::size_t predict(std::span<const double> p) {
  if (p.empty()) throw Error("predict: empty probability vector");
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

}  // namespace uniform
