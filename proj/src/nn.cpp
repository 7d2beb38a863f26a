// SPDX-License-Identifier: Apache-2.0
#include "uniform/nn.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace uniform {

int sgn(double x) noexcept {
  assert(!std::isnan(x));
  return (x > 0.0) - (x < 0.0);
}

Vec softmax(std::span<const double> v) {
  if (v.empty()) throw Error("softmax: empty vector");
  const double mx = *std::max_element(v.begin(), v.end());
  Vec out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

Vec softmax_backward(std::span<const double> p, std::span<const double> grad_p) {
  if (p.size() != grad_p.size()) throw Error("softmax_backward: shape mismatch");
  const double inner = dot(p, grad_p);
  Vec out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] * (grad_p[i] - inner);
  return out;
}

AffineBlock::AffineBlock(DenseMatrix w, Vec b)
    : weight(std::move(w)),
      bias(std::move(b)),
      grad_weight(weight.rows(), weight.cols()),
      grad_bias(bias.size(), 0.0) {
  if (bias.size() != weight.rows()) throw Error("AffineBlock: bias length does not match weight rows");
}

AffineBlock AffineBlock::zeros(std::size_t in, std::size_t out) {
  return AffineBlock(DenseMatrix(out, in), Vec(out, 0.0));
}

AffineBlock AffineBlock::glorot(Rng& rng, std::size_t in, std::size_t out) {
  return AffineBlock(glorot_init(rng, out, in), Vec(out, 0.0));
}

Vec AffineBlock::forward(std::span<const double> x) const {
  if (x.size() != in_dim()) {
    throw Error("AffineBlock: input dim " + std::to_string(x.size()) + " != " + std::to_string(in_dim()));
  }
  Vec y(out_dim());
  matvec(weight, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bias[i];
  return y;
}

Vec AffineBlock::backward(std::span<const double> x, std::span<const double> grad_out) {
  if (x.size() != in_dim() || grad_out.size() != out_dim()) throw Error("AffineBlock::backward: shape mismatch");
  outer_add(grad_weight, grad_out, x);
  for (std::size_t i = 0; i < grad_bias.size(); ++i) grad_bias[i] += grad_out[i];
  Vec grad_in(in_dim(), 0.0);
  matvec_transposed_add(weight, grad_out, grad_in);
  return grad_in;
}

void AffineBlock::zero_grads() {
  grad_weight.fill(0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
}

void AffineBlock::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", weight.flat(), grad_weight.flat(), weight.rows(), weight.cols()});
  out.push_back({prefix + ".bias", bias, grad_bias, 1, bias.size()});
}

MlpOutput mlp_forward(std::span<const AffineBlock> blocks, Activation activation, std::span<const double> x) {
  if (blocks.empty()) throw Error("mlp_forward: no blocks");
  MlpOutput out;
  out.cache.inputs.reserve(blocks.size());
  out.cache.pre_activations.reserve(blocks.size());
  Vec current(x.begin(), x.end());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].in_dim() != current.size()) {
      throw Error("mlp_forward: block " + std::to_string(k) + " expects input dim " +
                  std::to_string(blocks[k].in_dim()) + ", got " + std::to_string(current.size()));
    }
    Vec pre = blocks[k].forward(current);
    out.cache.inputs.push_back(std::move(current));
    current = pre;
    if (activation == Activation::relu && k + 1 < blocks.size()) {
      for (double& v : current) v = std::max(v, 0.0);
    }
    out.cache.pre_activations.push_back(std::move(pre));
  }
  out.output = std::move(current);
  return out;
}

Vec mlp_backward(std::span<AffineBlock> blocks, Activation activation, const MlpCache& cache,
                 std::span<const double> upstream) {
  if (cache.inputs.size() != blocks.size() || cache.pre_activations.size() != blocks.size()) {
    throw Error("mlp_backward: cache does not match block count");
  }
  if (upstream.size() != blocks.back().out_dim()) throw Error("mlp_backward: upstream gradient shape mismatch");
  Vec grad(upstream.begin(), upstream.end());
  for (std::size_t k = blocks.size(); k-- > 0;) {
    if (activation == Activation::relu && k + 1 < blocks.size()) {
      const Vec& pre = cache.pre_activations[k];
      for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!(pre[i] > 0.0)) grad[i] = 0.0;
      }
    }
    grad = blocks[k].backward(cache.inputs[k], grad);
  }
  return grad;
}

DenseMatrix glorot_init(Rng& rng, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw Error("glorot_init: dimensions must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  DenseMatrix m(rows, cols);
  for (double& v : m.flat()) v = rng.uniform(-bound, bound);
  return m;
}

}  // namespace uniform
