// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_CLUSTERING_HPP_
#define TRAJPRIOR_CLUSTERING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "trajprior/common.hpp"

namespace trajprior {

struct KMeansResult {
  Labels assignment;       // point -> cluster id in [0, K)
  Matrix centroids;        // K x F
  double objective = 0.0;  // sum of squared distances to assigned centroids
  // Objective after every assignment step; non-increasing.
  std::vector<double> objective_trace;
  int iterations = 0;
};

// k-means++ seeding followed by Lloyd iterations. Distance ties go to the
// lower cluster id. A cluster left empty by an assignment step takes the
// point farthest from its current centroid. Stops when assignments are
// stable, when the relative objective improvement drops below `tol`, or
// after `max_iters` assignment steps.
KMeansResult kmeans(const Matrix& points, std::uint32_t k, std::uint64_t seed, int max_iters = 100,
                    double tol = 0.0);

// The k-means++ seeding step alone (used to initialize GMM fitting too).
Matrix kmeans_plus_plus_init(const Matrix& points, std::uint32_t k, std::uint64_t seed);

// m independent k-means runs, one per seed base_seed + r.
struct ClusterModel {
  std::uint32_t k = 0;
  std::vector<KMeansResult> runs;

  std::uint32_t num_runs() const { return static_cast<std::uint32_t>(runs.size()); }
  std::size_t num_points() const { return runs.empty() ? 0 : runs.front().assignment.size(); }
};

ClusterModel build_cluster_model(const Matrix& points, std::uint32_t k, std::uint32_t m, std::uint64_t base_seed,
                                 int max_iters = 100);

// Per-video close neighbors C_i and background neighbors B_i; both sorted
// ascending and both contain i.
struct NeighborSets {
  std::vector<std::vector<Index>> close;
  std::vector<std::vector<Index>> background;

  std::size_t size() const { return close.size(); }
};

// C_i: union over runs of i's cluster-mates. B_i: the `background_k`
// entries with largest dot product to row i (ties to the lower index),
// plus i itself.
NeighborSets neighbor_sets(const ClusterModel& model, const Matrix& embeddings, std::uint32_t background_k);

// Same B_i construction, with C_i supplied by a fixed cluster model that may
// live in a different space than `embeddings`.
std::vector<std::vector<Index>> close_neighbors(const ClusterModel& model);
std::vector<std::vector<Index>> background_neighbors(const Matrix& embeddings, std::uint32_t background_k);

// Text export: one "video_id run_id cluster_id" line per (video, run).
std::string export_assignments(const ClusterModel& model, const std::vector<std::uint32_t>& video_ids);

}  // namespace trajprior

#endif  // TRAJPRIOR_CLUSTERING_HPP_
