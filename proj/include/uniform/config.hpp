// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "uniform/feature_consensus.hpp"
#include "uniform/logit_consensus.hpp"

namespace uniform {

enum class Method { uniform, kd, cflplus };
enum class OptimizerKind { sgd_momentum, adam };

std::string to_string(Method method);
Method method_from_string(const std::string& text);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double lr = 1e-3;
  double momentum = 0.9;  // sgd_momentum
  double beta1 = 0.9;     // adam
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  double alpha1 = 2.0;
  double alpha2 = 1.0;
  double beta1 = 1.0;
  double beta2 = 0.1;
  std::size_t common_dim = 16;
  std::vector<std::size_t> hidden{64};
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  double temperature = 1.0;
  FeatureMetric feature_metric = FeatureMetric::mse;
  bool detach_xhat = false;
  LogitSign logit_sign = LogitSign::corrected;
  Method method = Method::uniform;

  /// Throws on negative weights or lr, zero epochs or batch size.
  void validate() const;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static TrainConfig from_json(const nlohmann::json& j);
  static TrainConfig load(const std::filesystem::path& path);
};

}  // namespace uniform
