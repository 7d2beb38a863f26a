// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uniform/config.hpp"
#include "uniform/nn.hpp"

namespace uniform {

/// SGD with momentum (v <- mu v + g; p <- p - lr v) or bias-corrected Adam.
/// State is laid out by parameter position, so the same parameter list must
/// be passed to every step.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  void step(std::span<const ParamRef> params);
  std::size_t steps_taken() const noexcept { return t_; }

 private:
  OptimizerConfig config_;
  std::vector<Vec> first_;
  std::vector<Vec> second_;
  std::size_t t_ = 0;
};

}  // namespace uniform
