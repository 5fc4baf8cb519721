// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "trajprior/memory_bank.hpp"

using namespace trajprior;

TEST_SUITE("memory_bank") {
  TEST_CASE("update rule for lambda 1, 0 and 0.5") {
    Matrix rows = Matrix::Identity(3, 3);
    EmbeddingBank full(rows, 1.0, 0), none(rows, 0.0, 0), half(rows, 0.5, 0);
    const Vector e2 = Vector::Unit(3, 1);
    full.update(0, e2);
    none.update(0, e2);
    half.update(0, e2);
    CHECK(full.entries().row(0) == e2.transpose());
    CHECK(none.entries().row(0) == Vector::Unit(3, 0).transpose());
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(half.entries()(0, 0) == doctest::Approx(s).epsilon(1e-15));
    CHECK(half.entries()(0, 1) == doctest::Approx(s).epsilon(1e-15));
    CHECK_THROWS_AS(half.update(3, e2), InputError);
    CHECK_THROWS_AS(EmbeddingBank(rows, 1.5, 0), ConfigError);
  }

  TEST_CASE("rows stay unit norm under repeated updates") {
    std::mt19937_64 gen(1);
    EmbeddingBank bank = EmbeddingBank::random(20, 6, 0.5, 3);
    for (int t = 0; t < 500; ++t) bank.update(static_cast<Index>(t % 20), oracle::random_unit(gen, 6));
    for (Eigen::Index i = 0; i < 20; ++i) CHECK(std::abs(bank.entries().row(i).norm() - 1.0) < 1e-8);
    // the exact antipode of a row still yields a unit row
    const Vector back = -bank.entries().row(0).transpose();
    bank.update(0, back);
    CHECK(std::abs(bank.entries().row(0).norm() - 1.0) < 1e-8);
  }

  TEST_CASE("negatives exclude, never repeat, and exhaust the complement") {
    EmbeddingBank bank = EmbeddingBank::random(12, 3, 0.5, 4);
    const Index exclude[] = {2, 5, 11};
    for (int t = 0; t < 50; ++t) {
      const auto neg = bank.sample_negatives(exclude, 4);
      std::set<Index> s(neg.begin(), neg.end());
      CHECK(s.size() == 4);
      for (auto e : exclude) CHECK(s.count(e) == 0);
    }
    const auto all = bank.sample_negatives(exclude, 9);
    std::set<Index> s(all.begin(), all.end());
    CHECK(s == std::set<Index>{0, 1, 3, 4, 6, 7, 8, 9, 10});
    CHECK_THROWS_AS(bank.sample_negatives(exclude, 10), ConfigError);
  }

  TEST_CASE("fixed seed gives the same negative sequence") {
    EmbeddingBank a = EmbeddingBank::random(30, 3, 0.5, 9), b = EmbeddingBank::random(30, 3, 0.5, 9);
    for (int t = 0; t < 10; ++t) CHECK(a.sample_negatives({}, 5) == b.sample_negatives({}, 5));
  }

  TEST_CASE("single draws are uniform (chi-square at 0.01)") {
    EmbeddingBank bank = EmbeddingBank::random(10, 2, 0.5, 5);
    std::vector<double> counts(10, 0.0);
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) counts[bank.sample_negatives({}, 1).front()] += 1.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
    CHECK(chi2 < 21.666);  // 0.99 quantile, 9 degrees of freedom
  }

  TEST_CASE("store round trip keeps entries, lambda and generator state") {
    EmbeddingBank bank = EmbeddingBank::random(8, 4, 0.25, 6);
    bank.sample_negatives({}, 3);
    ArrayStore s;
    bank.to_store(s);
    for (const char* name : {"bank.entries", "bank.lambda"}) CHECK(s.has(name));
    EmbeddingBank back = EmbeddingBank::from_store(ArrayStore::deserialize(s.serialize()));
    CHECK(back.entries() == bank.entries());
    CHECK(back.lambda() == 0.25);
    CHECK(back.sample_negatives({}, 5) == bank.sample_negatives({}, 5));
  }
}
