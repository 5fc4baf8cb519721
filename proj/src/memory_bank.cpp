// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/memory_bank.hpp"

#include <cmath>

namespace trajprior {

EmbeddingBank::EmbeddingBank(Matrix entries, double lambda, std::uint64_t seed)
    : entries_(std::move(entries)), lambda_(lambda), rng_(seed) {
  require_config(lambda >= 0.0 && lambda <= 1.0, "memory bank: lambda must lie in [0, 1]");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    const double norm = entries_.row(i).norm();
    require_input(norm > 0.0 && std::isfinite(norm), "memory bank: rows must be nonzero and finite");
    entries_.row(i) /= norm;
  }
}

EmbeddingBank EmbeddingBank::random(std::size_t n, std::uint32_t dim, double lambda, std::uint64_t seed) {
  require_config(n >= 1 && dim >= 1, "memory bank: size and dimension must be positive");
  Rng init(derive_seed(seed, "bank-init"));
  Matrix entries(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < entries.size(); ++i) entries.data()[i] = init.normal();
  return EmbeddingBank(std::move(entries), lambda, derive_seed(seed, "bank-negatives"));
}

void EmbeddingBank::update(Index i, const Vector& d_new) {
  if (static_cast<Eigen::Index>(i) >= entries_.rows()) {
    throw InputError("memory bank: index " + std::to_string(i) + " out of range");
  }
  require_input(d_new.size() == entries_.cols(), "memory bank: embedding dimensionality mismatch");
  Vector row = (1.0 - lambda_) * entries_.row(i).transpose() + lambda_ * d_new;
  const double norm = row.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    // Antipodal update with lambda = 0.5; keep the new direction.
    row = d_new / d_new.norm();
  } else {
    row /= norm;
  }
  entries_.row(i) = row.transpose();
}

std::vector<Index> EmbeddingBank::sample_negatives(std::span<const Index> exclude, std::uint32_t m) {
  const auto n = static_cast<std::size_t>(entries_.rows());
  std::vector<char> excluded(n, 0);
  for (auto e : exclude) {
    if (e < n) excluded[e] = 1;
  }
  std::vector<Index> pool;
  pool.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!excluded[j]) pool.push_back(static_cast<Index>(j));
  }
  if (m > pool.size()) {
    throw ConfigError("memory bank: cannot draw " + std::to_string(m) + " negatives from " +
                      std::to_string(pool.size()) + " candidates");
  }
  for (std::uint32_t k = 0; k < m; ++k) std::swap(pool[k], pool[k + rng_.index(pool.size() - k)]);
  pool.resize(m);
  return pool;
}

void EmbeddingBank::to_store(ArrayStore& store) const {
  store.put("bank.entries", entries_);
  store.put_scalar("bank.lambda", lambda_);
  store.put_text("bank.rng", rng_.state());
}

EmbeddingBank EmbeddingBank::from_store(const ArrayStore& store) {
  EmbeddingBank bank;
  bank.entries_ = store.matrix("bank.entries");
  bank.lambda_ = store.scalar("bank.lambda");
  bank.rng_.set_state(store.text("bank.rng"));
  return bank;
}

}  // namespace trajprior
