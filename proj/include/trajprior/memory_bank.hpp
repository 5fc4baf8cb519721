// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_MEMORY_BANK_HPP_
#define TRAJPRIOR_MEMORY_BANK_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "trajprior/common.hpp"
#include "trajprior/io.hpp"
#include "trajprior/rng.hpp"

namespace trajprior {

// Per-video unit-norm embeddings d_1..d_N used as the non-parametric
// classifier weights. Rows are updated with momentum lambda and always
// renormalized.
class EmbeddingBank {
 public:
  EmbeddingBank() = default;
  EmbeddingBank(Matrix entries, double lambda, std::uint64_t seed);

  // Rows drawn from a standard normal and normalized.
  static EmbeddingBank random(std::size_t n, std::uint32_t dim, double lambda, std::uint64_t seed);

  // row_i <- normalize((1 - lambda) row_i + lambda d_new)
  void update(Index i, const Vector& d_new);

  // M indices drawn uniformly without replacement from the complement of
  // `exclude`.
  std::vector<Index> sample_negatives(std::span<const Index> exclude, std::uint32_t m);

  const Matrix& entries() const { return entries_; }
  Eigen::Index size() const { return entries_.rows(); }
  Eigen::Index dim() const { return entries_.cols(); }
  double lambda() const { return lambda_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  void to_store(ArrayStore& store) const;
  static EmbeddingBank from_store(const ArrayStore& store);

 private:
  Matrix entries_;
  double lambda_ = 0.5;
  Rng rng_;
};

}  // namespace trajprior

#endif  // TRAJPRIOR_MEMORY_BANK_HPP_
