// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "oracles.hpp"
#include "trajprior/encoder.hpp"

using namespace trajprior;

namespace {

Vector flatten(const EncoderParams& p) {
  std::vector<double> out;
  for (const auto& l : p.layers) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

EncoderParams unflatten(const EncoderParams& like, const Vector& v) {
  EncoderParams p = like;
  Eigen::Index at = 0;
  for (auto& l : p.layers) {
    std::copy(v.data() + at, v.data() + at + l.weight.size(), l.weight.data());
    at += l.weight.size();
    std::copy(v.data() + at, v.data() + at + l.bias.size(), l.bias.data());
    at += l.bias.size();
  }
  return p;
}

EncoderParams random_params(std::mt19937_64& gen, std::uint32_t in, std::vector<std::uint32_t> hidden, std::uint32_t out) {
  EncoderArchitecture arch{in, std::move(hidden), out};
  EncoderParams p = init_encoder(arch, gen());
  for (auto& l : p.layers) l.bias = oracle::random_matrix(gen, l.bias.size(), 1, 0.3);
  return p;
}

}  // namespace

TEST_SUITE("encoder") {
  TEST_CASE("output is unit norm and deterministic") {
    std::mt19937_64 gen(1);
    const EncoderParams p = random_params(gen, 7, {5, 4}, 3);
    for (int t = 0; t < 20; ++t) {
      const Vector x = oracle::random_matrix(gen, 7, 1);
      const Vector d = forward(p, x);
      CHECK(std::abs(d.norm() - 1.0) < 1e-10);
      CHECK(d == forward(p, x));
    }
  }

  TEST_CASE("zero final weights give the normalized bias") {
    std::mt19937_64 gen(2);
    EncoderParams p = random_params(gen, 4, {6}, 3);
    p.layers.back().weight.setZero();
    p.layers.back().bias = Vector::Constant(3, 2.0);
    const Vector d = forward(p, oracle::random_matrix(gen, 4, 1));
    CHECK((d - Vector::Constant(3, 1.0 / std::sqrt(3.0))).norm() < 1e-15);
  }

  TEST_CASE("forward matches a hand-written evaluation") {
    EncoderParams p;
    DenseLayer h{Matrix(2, 2), Vector(2)}, o{Matrix(2, 2), Vector(2)};
    h.weight << 1.0, -1.0, 0.5, 2.0;
    h.bias << 0.1, -0.2;
    o.weight << 1.0, 0.0, 1.0, 1.0;
    o.bias << 0.0, 0.5;
    p.layers = {h, o};
    Vector x(2);
    x << 0.3, -0.7;
    const double h0 = std::tanh(0.3 + 0.7 + 0.1), h1 = std::tanh(0.15 - 1.4 - 0.2);
    const double z0 = h0, z1 = h0 + h1 + 0.5;
    const double n = std::sqrt(z0 * z0 + z1 * z1);
    const Vector d = forward(p, x);
    CHECK(d(0) == doctest::Approx(z0 / n).epsilon(1e-14));
    CHECK(d(1) == doctest::Approx(z1 / n).epsilon(1e-14));
  }

  TEST_CASE("backward matches central finite differences") {
    std::mt19937_64 gen(3);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      std::vector<std::uint32_t> hidden;
      if (t % 3 != 0) hidden.push_back(4 + t % 3);
      if (t % 3 == 2) hidden.push_back(3);
      const EncoderParams p = random_params(gen, 5, hidden, 4);
      const Vector x = oracle::random_matrix(gen, 5, 1);
      const Vector g = oracle::random_matrix(gen, 4, 1);
      const Vector analytic = flatten(backward(p, x, g));
      const Vector numeric = oracle::numeric_gradient(
          [&](const Vector& v) { return g.dot(forward(unflatten(p, v), x)); }, flatten(p));
      worst = std::max(worst, oracle::relative_error(analytic, numeric));
    }
    CHECK(worst < 1e-5);
  }

  TEST_CASE("gradient parallel to the output is annihilated") {
    std::mt19937_64 gen(4);
    const EncoderParams p = random_params(gen, 6, {5}, 4);
    const Vector x = oracle::random_matrix(gen, 6, 1);
    const Vector d = forward(p, x);
    CHECK(flatten(backward(p, x, 3.0 * d)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("linear encoder gradient has the closed form") {
    std::mt19937_64 gen(5);
    const EncoderParams p = random_params(gen, 3, {}, 3);
    const Vector x = oracle::random_matrix(gen, 3, 1);
    const Vector g = oracle::random_matrix(gen, 3, 1);
    const Vector z = p.layers[0].weight * x + p.layers[0].bias;
    const Vector d = z / z.norm();
    const Vector delta = (g - d * d.dot(g)) / z.norm();
    const EncoderGrads grads = backward(p, x, g);
    CHECK((grads.layers[0].weight - delta * x.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((grads.layers[0].bias - delta).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("non-finite inputs are numeric errors") {
    std::mt19937_64 gen(6);
    const EncoderParams p = random_params(gen, 3, {4}, 2);
    Vector x = Vector::Zero(3);
    x(1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(forward(p, x), NumericError);
    CHECK_THROWS_AS(forward(p, Vector::Zero(4)), InputError);
  }

  TEST_CASE("store round trip") {
    std::mt19937_64 gen(7);
    const EncoderParams p = random_params(gen, 5, {4, 3}, 2);
    ArrayStore s;
    params_to_store(p, "enc", s);
    const EncoderParams q = params_from_store(ArrayStore::deserialize(s.serialize()), "enc");
    CHECK(flatten(q) == flatten(p));
    CHECK(q.architecture().hidden == std::vector<std::uint32_t>{4, 3});
  }
}

TEST_SUITE("optimizer") {
  TEST_CASE("vanilla step subtracts the gradient") {
    std::mt19937_64 gen(8);
    EncoderParams p = random_params(gen, 3, {2}, 2);
    const Vector before = flatten(p);
    const EncoderGrads g = unflatten(p, oracle::random_matrix(gen, before.size(), 1));
    OptimizerState st = make_optimizer(p, 1.0, 0.0, {});
    sgd_step(p, g, st, 0);
    CHECK((flatten(p) - (before - flatten(g))).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("velocity decays geometrically without gradients") {
    std::mt19937_64 gen(9);
    EncoderParams p = random_params(gen, 3, {2}, 2);
    OptimizerState st = make_optimizer(p, 0.1, 0.9, {});
    const Vector g0 = oracle::random_matrix(gen, flatten(p).size(), 1);
    sgd_step(p, unflatten(p, g0), st, 0);
    const EncoderGrads zero = p.zeros_like();
    for (int k = 1; k <= 5; ++k) {
      sgd_step(p, zero, st, 0);
      CHECK((flatten(st.velocity) - std::pow(0.9, k) * g0).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  TEST_CASE("two steps match the unrolled recurrence with a schedule drop") {
    std::mt19937_64 gen(10);
    EncoderParams p = random_params(gen, 2, {2}, 2);
    const Vector p0 = flatten(p);
    const Vector g1 = oracle::random_matrix(gen, p0.size(), 1), g2 = oracle::random_matrix(gen, p0.size(), 1);
    OptimizerState st = make_optimizer(p, 0.5, 0.8, {{1, 0.1}});
    sgd_step(p, unflatten(p, g1), st, 0);
    sgd_step(p, unflatten(p, g2), st, 1);
    const Vector v1 = g1;
    const Vector v2 = 0.8 * v1 + g2;
    const Vector expect = p0 - 0.5 * v1 - 0.05 * v2;
    CHECK((flatten(p) - expect).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("learning rate schedule is non-increasing") {
    EncoderParams p = init_encoder({3, {2}, 2}, 1);
    const OptimizerState st = make_optimizer(p, 0.03, 0.9, {{24, 0.1}, {28, 0.1}});
    CHECK(st.rate_at(0) == 0.03);
    CHECK(st.rate_at(24) == doctest::Approx(0.003));
    CHECK(st.rate_at(29) == doctest::Approx(0.0003));
    for (int e = 1; e < 40; ++e) CHECK(st.rate_at(e) <= st.rate_at(e - 1));
    CHECK_THROWS_AS(make_optimizer(p, 0.03, 1.0, {}), ConfigError);
    CHECK_THROWS_AS(make_optimizer(p, 0.0, 0.5, {}), ConfigError);
  }
}
