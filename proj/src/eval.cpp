// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "trajprior/rng.hpp"

namespace trajprior {

namespace {

// Dense class ids 0..C-1 in increasing order of the original label.
std::vector<std::uint32_t> densify(const Labels& labels, std::uint32_t& num_classes) {
  std::map<Index, std::uint32_t> ids;
  for (auto l : labels) ids.emplace(l, 0);
  std::uint32_t next = 0;
  for (auto& [_, id] : ids) id = next++;
  num_classes = next;
  std::vector<std::uint32_t> out;
  out.reserve(labels.size());
  for (auto l : labels) out.push_back(ids[l]);
  return out;
}

// Softmax regression by gradient descent with step 1/L. Returns C x (F+1)
// weights; the last column is the bias.
Matrix fit_logistic(const Matrix& x, const std::vector<std::uint32_t>& y, std::uint32_t classes,
                    const ProbeOptions& opt) {
  const Eigen::Index n = x.rows();
  const Eigen::Index f = x.cols();
  Matrix xa(n, f + 1);
  xa.leftCols(f) = x;
  xa.col(f).setOnes();
  const double max_sq = xa.rowwise().squaredNorm().maxCoeff();
  const double step = 1.0 / (0.5 * max_sq + opt.l2);

  Matrix onehot = Matrix::Zero(n, classes);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, y[static_cast<std::size_t>(i)]) = 1.0;

  Matrix w = Matrix::Zero(classes, f + 1);
  for (int it = 0; it < opt.max_iters; ++it) {
    Matrix logits = xa * w.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = logits.row(i).maxCoeff();
      logits.row(i) = (logits.row(i).array() - m).exp();
      logits.row(i) /= logits.row(i).sum();
    }
    Matrix grad = (logits - onehot).transpose() * xa / static_cast<double>(n);
    grad.leftCols(f) += opt.l2 * w.leftCols(f);
    w -= step * grad;
    if (grad.norm() < opt.grad_tol) break;
  }
  return w;
}

std::uint32_t predict(const Matrix& w, const Eigen::Ref<const Vector>& x) {
  const Eigen::Index f = x.size();
  std::uint32_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < w.rows(); ++c) {
    const double s = w.row(c).head(f).dot(x.transpose()) + w(c, f);
    if (s > best_score) {
      best_score = s;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

}  // namespace

ProbeReport linear_probe(const Matrix& embeddings, const Labels& labels, std::uint32_t shots, std::uint32_t episodes,
                         std::uint64_t seed, const ProbeOptions& options) {
  require_input(static_cast<std::size_t>(embeddings.rows()) == labels.size(), "linear_probe: label count mismatch");
  require_config(shots >= 1 && episodes >= 1, "linear_probe: shots and episodes must be positive");
  std::uint32_t classes = 0;
  const auto y = densify(labels, classes);
  std::vector<std::vector<Index>> members(classes);
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(static_cast<Index>(i));
  for (std::uint32_t c = 0; c < classes; ++c) {
    require_config(members[c].size() > shots, "linear_probe: class " + std::to_string(c) + " has only " +
                                                  std::to_string(members[c].size()) + " examples for " +
                                                  std::to_string(shots) + " shots");
  }

  ProbeReport report;
  report.shots = shots;
  report.episodes = episodes;
  for (std::uint32_t e = 0; e < episodes; ++e) {
    Rng rng(derive_seed(seed, e));
    std::vector<char> is_train(y.size(), 0);
    std::vector<Index> train;
    for (std::uint32_t c = 0; c < classes; ++c) {
      auto pool = members[c];
      for (std::uint32_t s = 0; s < shots; ++s) {
        std::swap(pool[s], pool[s + rng.index(pool.size() - s)]);
        train.push_back(pool[s]);
        is_train[pool[s]] = 1;
      }
    }
    std::sort(train.begin(), train.end());
    Matrix x(static_cast<Eigen::Index>(train.size()), embeddings.cols());
    std::vector<std::uint32_t> ty;
    for (std::size_t t = 0; t < train.size(); ++t) {
      x.row(static_cast<Eigen::Index>(t)) = embeddings.row(train[t]);
      ty.push_back(y[train[t]]);
    }
    const Matrix w = fit_logistic(x, ty, classes, options);
    std::size_t correct = 0, total = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (is_train[i]) continue;
      ++total;
      if (predict(w, embeddings.row(static_cast<Eigen::Index>(i)).transpose()) == y[i]) ++correct;
    }
    report.episode_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(total));
  }
  double sum = 0.0;
  for (double a : report.episode_accuracies) sum += a;
  report.accuracy = sum / static_cast<double>(episodes);
  return report;
}

ClusteringScores clustering_metrics(const Labels& assignment, const Labels& labels) {
  require_input(!assignment.empty(), "clustering_metrics: empty input");
  require_input(assignment.size() == labels.size(), "clustering_metrics: length mismatch");
  std::uint32_t ku = 0, kv = 0;
  const auto u = densify(assignment, ku);
  const auto v = densify(labels, kv);
  const double n = static_cast<double>(u.size());
  std::vector<double> table(static_cast<std::size_t>(ku) * kv, 0.0), cu(ku, 0.0), cv(kv, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    table[static_cast<std::size_t>(u[i]) * kv + v[i]] += 1.0;
    cu[u[i]] += 1.0;
    cv[v[i]] += 1.0;
  }
  double mi = 0.0;
  double purity_count = 0.0;
  for (std::uint32_t a = 0; a < ku; ++a) {
    double best = 0.0;
    for (std::uint32_t b = 0; b < kv; ++b) {
      const double nab = table[static_cast<std::size_t>(a) * kv + b];
      best = std::max(best, nab);
      if (nab > 0) mi += (nab / n) * std::log(n * nab / (cu[a] * cv[b]));
    }
    purity_count += best;
  }
  const double hu = entropy(cu, n);
  const double hv = entropy(cv, n);
  ClusteringScores s;
  s.purity = purity_count / n;
  if (hu + hv <= 0.0) {
    s.nmi = 1.0;
  } else {
    s.nmi = std::clamp(2.0 * mi / (hu + hv), 0.0, 1.0);
  }
  return s;
}

double retrieval_accuracy(const Matrix& embeddings, const Labels& labels) {
  require_input(embeddings.rows() >= 2, "retrieval_accuracy: need at least two embeddings");
  require_input(static_cast<std::size_t>(embeddings.rows()) == labels.size(), "retrieval_accuracy: label count mismatch");
  const Matrix gram = embeddings * embeddings.transpose();
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    Eigen::Index best = -1;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < gram.cols(); ++j) {
      if (j == i) continue;
      if (gram(i, j) > best_dot) {
        best_dot = gram(i, j);
        best = j;
      }
    }
    if (labels[static_cast<std::size_t>(best)] == labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gram.rows());
}

}  // namespace trajprior
