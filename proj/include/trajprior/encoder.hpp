// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_ENCODER_HPP_
#define TRAJPRIOR_ENCODER_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trajprior/common.hpp"
#include "trajprior/io.hpp"

namespace trajprior {

struct EncoderArchitecture {
  std::uint32_t input_dim = 0;
  std::vector<std::uint32_t> hidden = {64};  // tanh layers; empty = linear encoder
  std::uint32_t embedding_dim = 32;

  void validate() const;
};

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// Feed-forward encoder: tanh hidden layers, linear output, l2 normalization.
struct EncoderParams {
  std::vector<DenseLayer> layers;

  std::uint32_t input_dim() const { return static_cast<std::uint32_t>(layers.front().weight.cols()); }
  std::uint32_t embedding_dim() const { return static_cast<std::uint32_t>(layers.back().weight.rows()); }
  EncoderArchitecture architecture() const;

  // Same shapes, all zeros.
  EncoderParams zeros_like() const;
  bool all_finite() const;
};

// Weights uniform in +-1/sqrt(fan_in), biases zero.
EncoderParams init_encoder(const EncoderArchitecture& arch, std::uint64_t seed);

// Intermediate values kept for the backward pass.
struct ForwardCache {
  std::vector<Vector> activations;  // input, then each hidden output
  Vector pre_norm;                  // output layer value before normalization
  Vector embedding;                 // pre_norm / |pre_norm|
};

ForwardCache forward_cached(const EncoderParams& params, const Vector& feature);
Vector forward(const EncoderParams& params, const Vector& feature);

// Embeds every row of `features`.
Matrix embed_all(const EncoderParams& params, const Matrix& features);

using EncoderGrads = EncoderParams;

// Reverse-mode gradient of a scalar whose gradient w.r.t. the embedding is
// grad_d, including the normalization Jacobian (I - d d^T) / |pre_norm|.
EncoderGrads backward(const EncoderParams& params, const ForwardCache& cache, const Vector& grad_d);
EncoderGrads backward(const EncoderParams& params, const Vector& feature, const Vector& grad_d);

// acc += g, layer by layer.
void accumulate(EncoderGrads& acc, const EncoderGrads& g);

struct OptimizerState {
  EncoderGrads velocity;
  double learning_rate = 0.03;
  double momentum = 0.9;
  // (epoch, multiplier): from that epoch on the rate is multiplied.
  std::vector<std::pair<int, double>> schedule;

  double rate_at(int epoch) const;
};

OptimizerState make_optimizer(const EncoderParams& params, double learning_rate, double momentum,
                              std::vector<std::pair<int, double>> schedule);

// v <- momentum v + g;  p <- p - lr(epoch) v.
void sgd_step(EncoderParams& params, const EncoderGrads& grads, OptimizerState& state, int epoch);

void params_to_store(const EncoderParams& params, const std::string& prefix, ArrayStore& store);
EncoderParams params_from_store(const ArrayStore& store, const std::string& prefix);

}  // namespace trajprior

#endif  // TRAJPRIOR_ENCODER_HPP_
