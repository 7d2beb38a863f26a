// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uniform/matrix.hpp"
#include "uniform/rng.hpp"

namespace uniform {

/// Exact three-valued sign: no epsilon band around zero.
int sgn(double x) noexcept;

/// Numerically stable softmax (max subtracted). Throws on empty input.
Vec softmax(std::span<const double> v);

/// Backward of p = softmax(z): returns dL/dz given p and dL/dp.
Vec softmax_backward(std::span<const double> p, std::span<const double> grad_p);

/// View over one trainable tensor and its gradient buffer.
struct ParamRef {
  std::string name;
  std::span<double> value;
  std::span<double> grad;
  std::size_t rows = 1;  // storage shape; biases are 1 x n
  std::size_t cols = 0;
};

/// y = W x + b with gradient buffers that accumulate across backward calls.
struct AffineBlock {
  DenseMatrix weight;  // out x in
  Vec bias;            // out
  DenseMatrix grad_weight;
  Vec grad_bias;

  AffineBlock() = default;
  AffineBlock(DenseMatrix w, Vec b);
  static AffineBlock zeros(std::size_t in, std::size_t out);
  static AffineBlock glorot(Rng& rng, std::size_t in, std::size_t out);

  std::size_t in_dim() const noexcept { return weight.cols(); }
  std::size_t out_dim() const noexcept { return weight.rows(); }

  Vec forward(std::span<const double> x) const;
  /// Accumulates dW += g x^T, db += g and returns W^T g.
  Vec backward(std::span<const double> x, std::span<const double> grad_out);
  void zero_grads();
  void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

enum class Activation { relu, identity };

/// Inputs to each block and pre-activation outputs, enough for backward.
struct MlpCache {
  std::vector<Vec> inputs;
  std::vector<Vec> pre_activations;
};

struct MlpOutput {
  Vec output;
  MlpCache cache;
};

/// Chains the blocks, applying the activation between blocks but not after
/// the last one.
MlpOutput mlp_forward(std::span<const AffineBlock> blocks, Activation activation,
                      std::span<const double> x);

/// Accumulates parameter gradients into `blocks` and returns the input
/// gradient. ReLU'(0) is taken as 0.
Vec mlp_backward(std::span<AffineBlock> blocks, Activation activation, const MlpCache& cache,
                 std::span<const double> upstream);

/// Uniform in +-sqrt(6 / (rows + cols)).
DenseMatrix glorot_init(Rng& rng, std::size_t rows, std::size_t cols);

}  // namespace uniform
