// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <numeric>
#include <set>

#include "oracles.hpp"
#include "trajprior/clustering.hpp"

using namespace trajprior;

namespace {

double partition_cost(const Matrix& pts, const std::vector<int>& side) {
  double cost = 0.0;
  for (int c = 0; c < 2; ++c) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(pts.cols());
    int count = 0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (side[static_cast<std::size_t>(i)] == c) {
        mean += pts.row(i);
        ++count;
      }
    }
    if (count == 0) return std::numeric_limits<double>::infinity();
    mean /= count;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (side[static_cast<std::size_t>(i)] == c) cost += (pts.row(i) - mean).squaredNorm();
    }
  }
  return cost;
}

Matrix blobs(std::mt19937_64& gen, int per_blob, int num_blobs, double spread = 0.1) {
  Matrix pts = oracle::random_matrix(gen, per_blob * num_blobs, 2, spread);
  for (int b = 0; b < num_blobs; ++b) {
    for (int i = 0; i < per_blob; ++i) {
      pts(b * per_blob + i, 0) += 10.0 * b;
      pts(b * per_blob + i, 1) += 5.0 * (b % 2);
    }
  }
  return pts;
}

}  // namespace

TEST_SUITE("kmeans") {
  TEST_CASE("K equal to N gives zero objective") {
    std::mt19937_64 gen(1);
    const Matrix pts = oracle::random_matrix(gen, 9, 3);
    const auto r = kmeans(pts, 9, 4);
    CHECK(r.objective == 0.0);
    CHECK(std::set<Index>(r.assignment.begin(), r.assignment.end()).size() == 9);
  }

  TEST_CASE("two blobs: matches the brute-force optimal 2-partition") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      std::mt19937_64 gen(10 + s);
      const Matrix pts = blobs(gen, 6, 2, 1.0);
      double best = std::numeric_limits<double>::infinity();
      std::vector<int> best_side;
      for (unsigned mask = 0; mask < (1u << 11); ++mask) {
        std::vector<int> side(12, 0);
        for (int i = 1; i < 12; ++i) side[static_cast<std::size_t>(i)] = (mask >> (i - 1)) & 1;
        const double c = partition_cost(pts, side);
        if (c < best) {
          best = c;
          best_side = side;
        }
      }
      const auto r = kmeans(pts, 2, s);
      CHECK(r.objective == doctest::Approx(best).epsilon(1e-10));
      for (std::size_t i = 1; i < 12; ++i) {
        CHECK((r.assignment[i] == r.assignment[0]) == (best_side[i] == best_side[0]));
      }
    }
  }

  TEST_CASE("objective never increases and the result is a local optimum") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      std::mt19937_64 gen(100 + s);
      const Matrix pts = oracle::random_matrix(gen, 80, 3);
      const auto r = kmeans(pts, 6, s);
      for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
        CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] * (1 + 1e-12));
      }
      std::vector<int> counts(6, 0);
      for (auto a : r.assignment) ++counts[a];
      for (int c : counts) CHECK(c > 0);
      for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const auto own = r.assignment[static_cast<std::size_t>(i)];
        const double d_own = (pts.row(i) - r.centroids.row(own)).squaredNorm();
        for (Eigen::Index c = 0; c < 6; ++c) CHECK(d_own <= (pts.row(i) - r.centroids.row(c)).squaredNorm() + 1e-12);
      }
    }
  }

  TEST_CASE("duplicate points still give no empty cluster") {
    Matrix pts = Matrix::Zero(10, 2);
    pts.row(9) << 1.0, 1.0;
    const auto r = kmeans(pts, 3, 0);
    std::set<Index> used(r.assignment.begin(), r.assignment.end());
    CHECK(used.size() == 3);
  }

  TEST_CASE("too few points is a configuration error") {
    CHECK_THROWS_AS(kmeans(Matrix::Zero(2, 2), 3, 0), ConfigError);
    CHECK_THROWS_AS(kmeans(Matrix::Zero(2, 2), 0, 0), ConfigError);
  }
}

TEST_SUITE("cluster_model") {
  TEST_CASE("single run equals kmeans and runs are reproducible") {
    std::mt19937_64 gen(2);
    const Matrix pts = oracle::random_matrix(gen, 40, 2);
    const auto m1 = build_cluster_model(pts, 4, 1, 17);
    CHECK(m1.runs.size() == 1);
    CHECK(m1.runs[0].assignment == kmeans(pts, 4, 17).assignment);
    const auto a = build_cluster_model(pts, 4, 3, 5), b = build_cluster_model(pts, 4, 3, 5);
    for (int r = 0; r < 3; ++r) {
      CHECK(a.runs[r].assignment == b.runs[r].assignment);
      CHECK(a.runs[r].centroids == b.runs[r].centroids);
    }
  }

  TEST_CASE("separated blobs: all runs agree up to relabeling") {
    std::mt19937_64 gen(3);
    const Matrix pts = blobs(gen, 10, 4);
    const auto m = build_cluster_model(pts, 4, 3, 0);
    for (int r = 1; r < 3; ++r) CHECK(oracle::brute_force_nmi(m.runs[0].assignment, m.runs[r].assignment) == doctest::Approx(1.0));
  }

  TEST_CASE("neighbor set invariants") {
    std::mt19937_64 gen(4);
    const Matrix emb = oracle::random_unit_rows(gen, 30, 4);
    const auto model = build_cluster_model(emb, 5, 3, 1);
    const auto sets = neighbor_sets(model, emb, 6);
    for (Index i = 0; i < 30; ++i) {
      CHECK(std::binary_search(sets.close[i].begin(), sets.close[i].end(), i));
      CHECK(std::binary_search(sets.background[i].begin(), sets.background[i].end(), i));
      CHECK(sets.background[i].size() == 7);
      CHECK(std::is_sorted(sets.close[i].begin(), sets.close[i].end()));
    }
    // union over runs is monotone
    ClusterModel first;
    first.k = model.k;
    first.runs = {model.runs[0], model.runs[1]};
    const auto sub = close_neighbors(first);
    for (Index i = 0; i < 30; ++i) {
      CHECK(std::includes(sets.close[i].begin(), sets.close[i].end(), sub[i].begin(), sub[i].end()));
    }
  }

  TEST_CASE("single cluster and exhaustive background") {
    std::mt19937_64 gen(5);
    const Matrix emb = oracle::random_unit_rows(gen, 10, 3);
    const auto sets = neighbor_sets(build_cluster_model(emb, 1, 1, 0), emb, 9);
    std::vector<Index> all(10);
    std::iota(all.begin(), all.end(), 0);
    for (Index i = 0; i < 10; ++i) {
      CHECK(sets.close[i] == all);
      CHECK(sets.background[i] == all);
    }
    CHECK_THROWS_AS(background_neighbors(emb, 10), ConfigError);
  }

  TEST_CASE("background sets match a full sort on a small instance") {
    std::mt19937_64 gen(6);
    const Matrix emb = oracle::random_unit_rows(gen, 8, 3);
    const auto bg = background_neighbors(emb, 3);
    for (Index i = 0; i < 8; ++i) {
      std::vector<std::pair<double, Index>> order;
      for (Index j = 0; j < 8; ++j) {
        if (j != i) order.push_back({-emb.row(i).dot(emb.row(j)), j});
      }
      std::sort(order.begin(), order.end());
      std::vector<Index> expect = {i, order[0].second, order[1].second, order[2].second};
      std::sort(expect.begin(), expect.end());
      CHECK(bg[i] == expect);
    }
  }

  TEST_CASE("ties in the background go to the lower index") {
    Matrix emb(4, 2);
    emb << 1, 0, 0, 1, 0, 1, 0, 1;
    const auto bg = background_neighbors(emb, 1);
    CHECK(bg[0] == std::vector<Index>{0, 1});
  }

  TEST_CASE("assignment export lists every video and run") {
    std::mt19937_64 gen(7);
    const auto model = build_cluster_model(oracle::random_matrix(gen, 5, 2), 2, 2, 0);
    const std::string text = export_assignments(model, {10, 11, 12, 13, 14});
    CHECK(text.rfind("video_id run_id cluster_id\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 11);
    CHECK(text.find("\n14 1 ") != std::string::npos);
    CHECK_THROWS_AS(export_assignments(model, {1, 2}), InputError);
  }
}
