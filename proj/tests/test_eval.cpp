// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/QR>

#include "oracles.hpp"
#include "trajprior/eval.hpp"

using namespace trajprior;

namespace {

Matrix random_rotation(std::mt19937_64& gen, Eigen::Index dim) {
  const Eigen::MatrixXd a = oracle::random_matrix(gen, dim, dim);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(dim, dim);
}

}  // namespace

TEST_SUITE("probe") {
  TEST_CASE("one-hot embeddings are perfectly separable") {
    Labels labels;
    Matrix emb(40, 4);
    for (int i = 0; i < 40; ++i) {
      labels.push_back(static_cast<Index>(i % 4));
      emb.row(i) = Vector::Unit(4, i % 4).transpose();
    }
    for (std::uint32_t shots : {1u, 3u}) CHECK(linear_probe(emb, labels, shots, 5, 1).accuracy == 1.0);
  }

  TEST_CASE("random labels score chance") {
    std::mt19937_64 gen(2);
    const Matrix emb = oracle::random_matrix(gen, 300, 8);
    Labels labels;
    for (int i = 0; i < 300; ++i) labels.push_back(static_cast<Index>(gen() % 3));
    const auto r = linear_probe(emb, labels, 5, 20, 3);
    const double n_test = 300 - 15;
    const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / (n_test * 20));
    CHECK(std::abs(r.accuracy - 1.0 / 3) < 3.0 * se + 0.02);  // slack for within-episode correlation
    CHECK(r.episode_accuracies.size() == 20);
    double mean = 0.0;
    for (double a : r.episode_accuracies) mean += a / 20.0;
    CHECK(r.accuracy == doctest::Approx(mean).epsilon(1e-14));
  }

  TEST_CASE("fixed seed gives an identical report; too few examples is an error") {
    std::mt19937_64 gen(3);
    const Matrix emb = oracle::random_matrix(gen, 60, 5);
    Labels labels;
    for (int i = 0; i < 60; ++i) labels.push_back(static_cast<Index>(i % 4));
    const auto a = linear_probe(emb, labels, 2, 4, 9), b = linear_probe(emb, labels, 2, 4, 9);
    CHECK(a.episode_accuracies == b.episode_accuracies);
    CHECK_THROWS_AS(linear_probe(emb, labels, 15, 1, 0), ConfigError);
    CHECK_THROWS_AS(linear_probe(emb, labels, 0, 1, 0), ConfigError);
  }

  TEST_CASE("accuracy is invariant to a global rotation") {
    std::mt19937_64 gen(4);
    Matrix emb = oracle::random_matrix(gen, 120, 6);
    Labels labels;
    for (int i = 0; i < 120; ++i) {
      labels.push_back(static_cast<Index>(i % 3));
      emb(i, i % 3) += 1.5;
    }
    const Matrix rot = emb * random_rotation(gen, 6).transpose();
    const auto a = linear_probe(emb, labels, 5, 6, 11), b = linear_probe(rot, labels, 5, 6, 11);
    for (std::size_t e = 0; e < a.episode_accuracies.size(); ++e) {
      CHECK(std::abs(a.episode_accuracies[e] - b.episode_accuracies[e]) <= 1.0 / 105 + 1e-12);
    }
  }
}

TEST_SUITE("clustering_metrics") {
  TEST_CASE("perfect agreement and the single-cluster degenerate case") {
    const Labels l = {0, 0, 1, 1, 2, 2};
    const auto p = clustering_metrics(l, l);
    CHECK(p.nmi == doctest::Approx(1.0));
    CHECK(p.purity == 1.0);
    const auto s = clustering_metrics(Labels(6, 0), l);
    CHECK(s.nmi == doctest::Approx(0.0));
    CHECK(s.purity == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("small instance matches the entropy computation") {
    const Labels u = {0, 0, 0, 1, 1, 1, 2, 2, 2, 2};
    const Labels v = {0, 0, 1, 1, 1, 0, 2, 2, 0, 1};
    const auto s = clustering_metrics(u, v);
    CHECK(s.nmi == doctest::Approx(oracle::brute_force_nmi(u, v)).epsilon(1e-12));
    // purity: clusters {0,0,1} {1,1,0} {2,2,0,1} -> 2 + 2 + 2 of 10
    CHECK(s.purity == doctest::Approx(0.6));
  }

  TEST_CASE("bounded and symmetric on random labelings") {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 30; ++t) {
      Labels u, v;
      for (int i = 0; i < 50; ++i) {
        u.push_back(static_cast<Index>(gen() % 4));
        v.push_back(static_cast<Index>(gen() % 6));
      }
      const auto a = clustering_metrics(u, v), b = clustering_metrics(v, u);
      CHECK(a.nmi == doctest::Approx(b.nmi).epsilon(1e-12));
      CHECK(a.nmi >= 0.0);
      CHECK(a.nmi <= 1.0);
      CHECK(a.purity >= 0.0);
      CHECK(a.purity <= 1.0);
      CHECK(a.nmi == doctest::Approx(oracle::brute_force_nmi(u, v)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(clustering_metrics({}, {}), InputError);
    CHECK_THROWS_AS(clustering_metrics({0}, {0, 1}), InputError);
  }
}

TEST_SUITE("retrieval") {
  TEST_CASE("duplicated class embeddings retrieve perfectly") {
    Matrix emb(6, 3);
    Labels labels;
    for (int i = 0; i < 6; ++i) {
      emb.row(i) = Vector::Unit(3, i / 2).transpose();
      labels.push_back(static_cast<Index>(i / 2));
    }
    CHECK(retrieval_accuracy(emb, labels) == 1.0);
  }

  TEST_CASE("hand-built three-point case") {
    Matrix emb(3, 2);
    emb << 1.0, 0.0, 0.9, 0.1, 0.0, 1.0;
    // neighbors: 0 -> 1, 1 -> 0, 2 -> 1
    CHECK(retrieval_accuracy(emb, {0, 0, 1}) == doctest::Approx(2.0 / 3));
    CHECK(retrieval_accuracy(emb, {0, 1, 1}) == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(retrieval_accuracy(emb.topRows(1), {0}), InputError);
  }

  TEST_CASE("random two-class labels score about one half") {
    std::mt19937_64 gen(6);
    const Matrix emb = oracle::random_unit_rows(gen, 2000, 5);
    Labels labels;
    for (int i = 0; i < 2000; ++i) labels.push_back(static_cast<Index>(gen() % 2));
    CHECK(std::abs(retrieval_accuracy(emb, labels) - 0.5) < 3.0 * std::sqrt(0.25 / 2000));
  }

  TEST_CASE("recall is invariant under a common rotation") {
    std::mt19937_64 gen(7);
    const Matrix emb = oracle::random_unit_rows(gen, 100, 4);
    Labels labels;
    for (int i = 0; i < 100; ++i) labels.push_back(static_cast<Index>(gen() % 3));
    CHECK(retrieval_accuracy(emb, labels) == retrieval_accuracy(emb * random_rotation(gen, 4).transpose(), labels));
  }
}
