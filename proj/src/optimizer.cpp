// SPDX-License-Identifier: Apache-2.0
#include "uniform/optimizer.hpp"

#include <cmath>

namespace uniform {

void Optimizer::step(std::span<const ParamRef> params) {
  if (first_.empty()) {
    for (const auto& p : params) {
      first_.emplace_back(p.value.size(), 0.0);
      if (config_.kind == OptimizerKind::adam) second_.emplace_back(p.value.size(), 0.0);
    }
  }
  if (first_.size() != params.size()) throw Error("optimizer: parameter list changed between steps");
  ++t_;
  const double lr = config_.lr;
  if (config_.kind == OptimizerKind::sgd_momentum) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto& v = first_[k];
      const auto& p = params[k];
      if (v.size() != p.value.size()) throw Error("optimizer: shape mismatch for " + p.name);
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = config_.momentum * v[i] + p.grad[i];
        p.value[i] -= lr * v[i];
      }
    }
    return;
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = first_[k];
    auto& v = second_[k];
    const auto& p = params[k];
    if (m.size() != p.value.size()) throw Error("optimizer: shape mismatch for " + p.name);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double g = p.grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p.value[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

}  // namespace uniform
