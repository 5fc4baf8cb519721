// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_OBJECTIVES_HPP_
#define TRAJPRIOR_OBJECTIVES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "trajprior/clustering.hpp"
#include "trajprior/common.hpp"
#include "trajprior/memory_bank.hpp"

namespace trajprior {

// Non-parametric softmax over the memory bank:
//   P(i | d) = exp(d_i . d / tau) / sum_j exp(d_j . d / tau)
struct IrConfig {
  double tau = 0.07;
  std::uint32_t num_negatives = 128;
  // When false, the denominator is estimated from num_negatives uniform
  // draws, scaled to the population they stand for, plus the exact terms
  // that must appear (the positive, or a whole index set).
  bool exact_denominator = false;

  void validate() const;
};

// Batch member: video index and its current embedding f(x_i).
struct Query {
  Index index = 0;
  Vector embedding;
};

struct LossAndGrads {
  double loss = 0.0;                 // mean over the batch
  std::vector<Vector> grads;         // d loss / d embedding, per batch member
  std::vector<double> per_instance;  // unaveraged contributions
};

// Plain softmax over arbitrary classifier weights: exp(w_i . d) / sum_j exp(w_j . d).
double parametric_prob(Index i, const Vector& d, const Matrix& weights);

// Exact-denominator P(i | d).
double instance_prob_exact(Index i, const Vector& d, const Matrix& bank_entries, double tau);

// P(i | d) under cfg; sampled mode draws negatives from the bank's generator.
double instance_prob(Index i, const Vector& d, EmbeddingBank& bank, const IrConfig& cfg);

// P(A | d) = sum_{i in A} P(i | d) with a single denominator evaluation.
double set_prob(std::span<const Index> set, const Vector& d, EmbeddingBank& bank, const IrConfig& cfg);
double set_prob_exact(std::span<const Index> set, const Vector& d, const Matrix& bank_entries, double tau);

// Mean of -log P(i | d_i) over the batch with exact gradients for the chosen
// denominator mode. The bank is read, not written; callers commit the batch
// embeddings with commit_to_bank after the step.
LossAndGrads ir_loss_and_grad(std::span<const Query> batch, EmbeddingBank& bank, const IrConfig& cfg);

// Mean of -log[ P(C_i n B_i | d) / P(B_i | d) ]. The full softmax denominator
// cancels, so only the bank rows indexed by B_i are touched.
LossAndGrads la_loss_and_grad(std::span<const Query> batch, const NeighborSets& neighbors, const EmbeddingBank& bank,
                              double tau);

// The same ratio evaluated through two full exact-softmax set probabilities.
double la_loss_softmax_path(Index i, const Vector& d, const NeighborSets& neighbors, const Matrix& bank_entries,
                            double tau);

// Sorted intersection of two ascending index lists.
std::vector<Index> intersect_sorted(std::span<const Index> a, std::span<const Index> b);

void commit_to_bank(std::span<const Query> batch, EmbeddingBank& bank);

}  // namespace trajprior

#endif  // TRAJPRIOR_OBJECTIVES_HPP_
