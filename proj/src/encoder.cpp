// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/encoder.hpp"

#include <cmath>

#include "trajprior/rng.hpp"

namespace trajprior {

void EncoderArchitecture::validate() const {
  require_config(input_dim >= 1, "encoder: input_dim must be positive");
  require_config(embedding_dim >= 1, "encoder: embedding_dim must be positive");
  for (auto h : hidden) require_config(h >= 1, "encoder: hidden widths must be positive");
}

EncoderArchitecture EncoderParams::architecture() const {
  EncoderArchitecture a;
  a.input_dim = input_dim();
  a.embedding_dim = embedding_dim();
  a.hidden.clear();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) a.hidden.push_back(static_cast<std::uint32_t>(layers[l].weight.rows()));
  return a;
}

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams z;
  z.layers.reserve(layers.size());
  for (const auto& l : layers) {
    z.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return z;
}

bool EncoderParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

EncoderParams init_encoder(const EncoderArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  Rng rng(seed);
  EncoderParams p;
  std::uint32_t fan_in = arch.input_dim;
  auto add_layer = [&](std::uint32_t out) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseLayer layer{Matrix(out, fan_in), Vector::Zero(out)};
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = bound * (2.0 * rng.uniform() - 1.0);
    p.layers.push_back(std::move(layer));
    fan_in = out;
  };
  for (auto h : arch.hidden) add_layer(h);
  add_layer(arch.embedding_dim);
  return p;
}

ForwardCache forward_cached(const EncoderParams& params, const Vector& feature) {
  require_input(!params.layers.empty(), "encoder: no layers");
  require_input(feature.size() == params.layers.front().weight.cols(), "encoder: feature dimensionality mismatch");
  ForwardCache cache;
  cache.activations.reserve(params.layers.size());
  cache.activations.push_back(feature);
  const std::size_t last = params.layers.size() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    const auto& layer = params.layers[l];
    Vector h = (layer.weight * cache.activations.back() + layer.bias).array().tanh().matrix();
    if (!h.allFinite()) throw NumericError("encoder: non-finite activation in layer " + std::to_string(l));
    cache.activations.push_back(std::move(h));
  }
  cache.pre_norm = params.layers[last].weight * cache.activations.back() + params.layers[last].bias;
  const double norm = cache.pre_norm.norm();
  if (!std::isfinite(norm)) throw NumericError("encoder: non-finite output in layer " + std::to_string(last));
  if (!(norm > 0.0)) throw NumericError("encoder: zero output in layer " + std::to_string(last));
  cache.embedding = cache.pre_norm / norm;
  return cache;
}

Vector forward(const EncoderParams& params, const Vector& feature) { return forward_cached(params, feature).embedding; }

Matrix embed_all(const EncoderParams& params, const Matrix& features) {
  Matrix out(features.rows(), params.embedding_dim());
  for (Eigen::Index i = 0; i < features.rows(); ++i) out.row(i) = forward(params, features.row(i).transpose()).transpose();
  return out;
}

EncoderGrads backward(const EncoderParams& params, const ForwardCache& cache, const Vector& grad_d) {
  require_input(grad_d.size() == cache.embedding.size(), "encoder: gradient dimensionality mismatch");
  const Vector& d = cache.embedding;
  Vector g = (grad_d - d * d.dot(grad_d)) / cache.pre_norm.norm();
  EncoderGrads grads = params.zeros_like();
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const Vector& input = cache.activations[l];
    grads.layers[l].weight.noalias() = g * input.transpose();
    grads.layers[l].bias = g;
    if (l == 0) break;
    Vector upstream = params.layers[l].weight.transpose() * g;
    g = upstream.array() * (1.0 - input.array().square());
    if (!g.allFinite()) throw NumericError("encoder: non-finite gradient in layer " + std::to_string(l - 1));
  }
  if (!grads.all_finite()) throw NumericError("encoder: non-finite parameter gradient");
  return grads;
}

EncoderGrads backward(const EncoderParams& params, const Vector& feature, const Vector& grad_d) {
  return backward(params, forward_cached(params, feature), grad_d);
}

void accumulate(EncoderGrads& acc, const EncoderGrads& g) {
  for (std::size_t l = 0; l < acc.layers.size(); ++l) {
    acc.layers[l].weight += g.layers[l].weight;
    acc.layers[l].bias += g.layers[l].bias;
  }
}

double OptimizerState::rate_at(int epoch) const {
  double rate = learning_rate;
  for (const auto& [at, mult] : schedule) {
    if (at <= epoch) rate *= mult;
  }
  return rate;
}

OptimizerState make_optimizer(const EncoderParams& params, double learning_rate, double momentum,
                              std::vector<std::pair<int, double>> schedule) {
  require_config(learning_rate > 0.0, "optimizer: learning rate must be positive");
  require_config(momentum >= 0.0 && momentum < 1.0, "optimizer: momentum must lie in [0, 1)");
  for (const auto& [at, mult] : schedule) {
    require_config(at >= 0 && mult > 0.0 && mult <= 1.0, "optimizer: schedule multipliers must lie in (0, 1]");
  }
  OptimizerState s;
  s.velocity = params.zeros_like();
  s.learning_rate = learning_rate;
  s.momentum = momentum;
  s.schedule = std::move(schedule);
  return s;
}

void sgd_step(EncoderParams& params, const EncoderGrads& grads, OptimizerState& state, int epoch) {
  require_input(grads.layers.size() == params.layers.size() && state.velocity.layers.size() == params.layers.size(),
                "sgd_step: shape mismatch");
  const double rate = state.rate_at(epoch);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& v = state.velocity.layers[l];
    v.weight = state.momentum * v.weight + grads.layers[l].weight;
    v.bias = state.momentum * v.bias + grads.layers[l].bias;
    params.layers[l].weight -= rate * v.weight;
    params.layers[l].bias -= rate * v.bias;
  }
}

void params_to_store(const EncoderParams& params, const std::string& prefix, ArrayStore& store) {
  store.put_u64_scalar(prefix + ".num_layers", params.layers.size());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto name = prefix + ".layer" + std::to_string(l);
    store.put(name + ".weight", params.layers[l].weight);
    store.put(name + ".bias", params.layers[l].bias);
  }
}

EncoderParams params_from_store(const ArrayStore& store, const std::string& prefix) {
  EncoderParams p;
  const auto n = store.u64_scalar(prefix + ".num_layers");
  for (std::uint64_t l = 0; l < n; ++l) {
    const auto name = prefix + ".layer" + std::to_string(l);
    p.layers.push_back({store.matrix(name + ".weight"), store.vector(name + ".bias")});
    if (p.layers.back().weight.rows() != p.layers.back().bias.size() ||
        (l > 0 && p.layers[l].weight.cols() != p.layers[l - 1].weight.rows())) {
      throw FormatError("encoder: inconsistent layer shapes in " + prefix);
    }
  }
  if (p.layers.empty()) throw FormatError("encoder: no layers in " + prefix);
  return p;
}

}  // namespace trajprior
