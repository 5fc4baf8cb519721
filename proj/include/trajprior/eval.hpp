// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_EVAL_HPP_
#define TRAJPRIOR_EVAL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "trajprior/common.hpp"

namespace trajprior {

struct ProbeOptions {
  double l2 = 1e-3;
  int max_iters = 3000;
  double grad_tol = 1e-6;
};

struct ProbeReport {
  std::uint32_t shots = 0;
  std::uint32_t episodes = 0;
  double accuracy = 0.0;  // mean of per-episode accuracies
  std::vector<double> episode_accuracies;
};

// Few-shot linear probe. Each episode draws `shots` training examples per
// class, fits multinomial logistic regression (with bias, l2 on weights) by
// full-batch gradient descent from zero, and scores the remaining examples.
ProbeReport linear_probe(const Matrix& embeddings, const Labels& labels, std::uint32_t shots,
                         std::uint32_t episodes, std::uint64_t seed, const ProbeOptions& options = {});

struct ClusteringScores {
  double nmi = 0.0;
  double purity = 0.0;
};

// NMI with arithmetic-mean normalization 2 I(U;V) / (H(U) + H(V)), and
// purity. Two constant labelings score NMI 1.
ClusteringScores clustering_metrics(const Labels& assignment, const Labels& labels);

// Fraction of rows whose nearest other row (max dot product, ties to the
// lower index) carries the same label.
double retrieval_accuracy(const Matrix& embeddings, const Labels& labels);

}  // namespace trajprior

#endif  // TRAJPRIOR_EVAL_HPP_
