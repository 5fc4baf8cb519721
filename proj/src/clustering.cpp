// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "trajprior/rng.hpp"

namespace trajprior {

Matrix kmeans_plus_plus_init(const Matrix& points, std::uint32_t k, std::uint64_t seed) {
  const auto n = points.rows();
  require_config(k >= 1, "kmeans: K must be positive");
  require_config(static_cast<Eigen::Index>(k) <= n, "kmeans: need at least K points (N=" + std::to_string(n) +
                                                        ", K=" + std::to_string(k) + ")");
  Rng rng(seed);
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));
  Vector d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (std::uint32_t c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      // All remaining mass is zero: every point coincides with a centroid.
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(pick);
    d2 = d2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

namespace {

// Returns the objective; fills assignment and per-point squared distance.
double assign(const Matrix& points, const Matrix& centroids, Labels& assignment, Vector& dist) {
  const auto n = points.rows();
  const auto k = centroids.rows();
  double objective = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    Index best_c = 0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<Index>(c);
      }
    }
    assignment[static_cast<std::size_t>(i)] = best_c;
    dist(i) = best;
    objective += best;
  }
  return objective;
}

// Moves the farthest point (from a cluster of size >= 2) into each empty
// cluster. Returns the objective after repair.
double repair_empty(const Matrix& points, Matrix& centroids, Labels& assignment, Vector& dist, double objective) {
  const auto k = centroids.rows();
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (auto a : assignment) ++counts[a];
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] != 0) continue;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (counts[assignment[static_cast<std::size_t>(i)]] < 2) continue;
      if (dist(i) > far_d) {
        far_d = dist(i);
        far = i;
      }
    }
    if (far < 0) break;  // N >= K guarantees this is unreachable
    --counts[assignment[static_cast<std::size_t>(far)]];
    assignment[static_cast<std::size_t>(far)] = static_cast<Index>(c);
    ++counts[static_cast<std::size_t>(c)];
    centroids.row(c) = points.row(far);
    objective -= dist(far);
    dist(far) = 0.0;
  }
  return objective;
}

void update_centroids(const Matrix& points, const Labels& assignment, Matrix& centroids) {
  const auto k = centroids.rows();
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto c = assignment[static_cast<std::size_t>(i)];
    sums.row(c) += points.row(i);
    ++counts[c];
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
  }
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::uint32_t k, std::uint64_t seed, int max_iters, double tol) {
  require_config(max_iters >= 1, "kmeans: max_iters must be positive");
  KMeansResult result;
  result.centroids = kmeans_plus_plus_init(points, k, seed);
  const auto n = static_cast<std::size_t>(points.rows());
  result.assignment.assign(n, 0);
  Labels previous(n, std::numeric_limits<Index>::max());
  Vector dist(points.rows());

  for (int it = 0; it < max_iters; ++it) {
    double objective = assign(points, result.centroids, result.assignment, dist);
    objective = repair_empty(points, result.centroids, result.assignment, dist, objective);
    result.objective_trace.push_back(objective);
    result.objective = objective;
    result.iterations = it + 1;
    const bool stable = result.assignment == previous;
    update_centroids(points, result.assignment, result.centroids);
    if (stable) break;
    if (result.objective_trace.size() >= 2) {
      const double prev = result.objective_trace[result.objective_trace.size() - 2];
      if (prev - objective <= tol * prev) break;
    }
    previous = result.assignment;
  }
  // Centroids are the means of the final assignment; report the matching objective.
  double final_objective = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    final_objective += (points.row(i) - result.centroids.row(result.assignment[static_cast<std::size_t>(i)])).squaredNorm();
  }
  result.objective = std::min(final_objective, result.objective);
  return result;
}

ClusterModel build_cluster_model(const Matrix& points, std::uint32_t k, std::uint32_t m, std::uint64_t base_seed,
                                 int max_iters) {
  require_config(m >= 1, "cluster model: m must be positive");
  ClusterModel model;
  model.k = k;
  model.runs.reserve(m);
  for (std::uint32_t r = 0; r < m; ++r) model.runs.push_back(kmeans(points, k, base_seed + r, max_iters));
  return model;
}

std::vector<std::vector<Index>> close_neighbors(const ClusterModel& model) {
  const auto n = model.num_points();
  std::vector<std::vector<Index>> close(n);
  std::vector<char> mark(n, 0);
  std::vector<std::vector<std::vector<Index>>> members(model.runs.size());
  for (std::size_t r = 0; r < model.runs.size(); ++r) {
    members[r].resize(model.k);
    for (std::size_t i = 0; i < n; ++i) members[r][model.runs[r].assignment[i]].push_back(static_cast<Index>(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(mark.begin(), mark.end(), 0);
    for (std::size_t r = 0; r < model.runs.size(); ++r) {
      for (auto j : members[r][model.runs[r].assignment[i]]) mark[j] = 1;
    }
    mark[i] = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (mark[j]) close[i].push_back(static_cast<Index>(j));
    }
  }
  return close;
}

std::vector<std::vector<Index>> background_neighbors(const Matrix& embeddings, std::uint32_t background_k) {
  const auto n = static_cast<std::size_t>(embeddings.rows());
  require_config(background_k < n || n == 0, "background_k must be smaller than the number of videos");
  std::vector<std::vector<Index>> background(n);
  const Matrix gram = embeddings * embeddings.transpose();
  std::vector<Index> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(static_cast<Index>(j));
    }
    const auto row = gram.row(static_cast<Eigen::Index>(i));
    std::partial_sort(order.begin(), order.begin() + background_k, order.end(), [&](Index a, Index b) {
      if (row(a) != row(b)) return row(a) > row(b);
      return a < b;
    });
    auto& set = background[i];
    set.assign(order.begin(), order.begin() + background_k);
    set.push_back(static_cast<Index>(i));
    std::sort(set.begin(), set.end());
  }
  return background;
}

NeighborSets neighbor_sets(const ClusterModel& model, const Matrix& embeddings, std::uint32_t background_k) {
  require_input(model.num_points() == static_cast<std::size_t>(embeddings.rows()),
                "neighbor_sets: cluster model and embeddings disagree on the number of videos");
  NeighborSets sets;
  sets.close = close_neighbors(model);
  sets.background = background_neighbors(embeddings, background_k);
  return sets;
}

std::string export_assignments(const ClusterModel& model, const std::vector<std::uint32_t>& video_ids) {
  require_input(video_ids.size() == model.num_points(), "export_assignments: id count mismatch");
  std::ostringstream out;
  out << "video_id run_id cluster_id\n";
  for (std::size_t i = 0; i < video_ids.size(); ++i) {
    for (std::size_t r = 0; r < model.runs.size(); ++r) {
      out << video_ids[i] << ' ' << r << ' ' << model.runs[r].assignment[i] << '\n';
    }
  }
  return out.str();
}

}  // namespace trajprior
