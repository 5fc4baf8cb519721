// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#include "trajprior/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace trajprior {

namespace {

// log sum_j exp(log_scale_j + s_j) and its gradient w.r.t. d, where
// s_j = d_j . d / tau.
struct LogPartition {
  double log_z = 0.0;
  Vector grad;
};

class TermSet {
 public:
  TermSet(const Vector& d, const Matrix& entries, double tau) : d_(d), entries_(entries), tau_(tau) {}

  void add(Index j, double log_scale = 0.0) {
    idx_.push_back(j);
    logit_.push_back(log_scale + entries_.row(j).dot(d_) / tau_);
  }

  LogPartition evaluate() const {
    LogPartition out;
    out.grad = Vector::Zero(d_.size());
    if (idx_.empty()) {
      out.log_z = -std::numeric_limits<double>::infinity();
      return out;
    }
    const double m = *std::max_element(logit_.begin(), logit_.end());
    double z = 0.0;
    for (std::size_t t = 0; t < idx_.size(); ++t) {
      const double w = std::exp(logit_[t] - m);
      z += w;
      out.grad += w * entries_.row(idx_[t]).transpose();
    }
    out.log_z = m + std::log(z);
    out.grad /= z * tau_;
    return out;
  }

 private:
  const Vector& d_;
  const Matrix& entries_;
  double tau_;
  std::vector<Index> idx_;
  std::vector<double> logit_;
};

void check_index(Index i, const Matrix& entries) {
  if (static_cast<Eigen::Index>(i) >= entries.rows()) {
    throw InputError("index " + std::to_string(i) + " out of range for a bank of " + std::to_string(entries.rows()));
  }
}

void check_query(const Vector& d, const Matrix& entries) {
  require_input(d.size() == entries.cols(), "embedding dimensionality does not match the bank");
}

// Denominator of P(. | d): exact over all rows, or the mandatory rows exactly
// plus a scaled uniform sample of the rest.
LogPartition denominator(const Vector& d, EmbeddingBank& bank, const IrConfig& cfg, std::span<const Index> mandatory) {
  const Matrix& entries = bank.entries();
  TermSet terms(d, entries, cfg.tau);
  const auto n = static_cast<std::size_t>(entries.rows());
  if (cfg.exact_denominator) {
    for (std::size_t j = 0; j < n; ++j) terms.add(static_cast<Index>(j));
    return terms.evaluate();
  }
  std::vector<char> forced(n, 0);
  std::size_t forced_count = 0;
  for (auto j : mandatory) {
    if (!forced[j]) {
      forced[j] = 1;
      ++forced_count;
      terms.add(j);
    }
  }
  const std::size_t available = n - forced_count;
  if (available == 0) return terms.evaluate();
  if (cfg.num_negatives >= available) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!forced[j]) terms.add(static_cast<Index>(j));
    }
    return terms.evaluate();
  }
  const double log_scale = std::log(static_cast<double>(available) / static_cast<double>(cfg.num_negatives));
  for (auto j : bank.sample_negatives(mandatory, cfg.num_negatives)) terms.add(j, log_scale);
  return terms.evaluate();
}

double log_sum_logits(std::span<const Index> set, const Vector& d, const Matrix& entries, double tau) {
  TermSet terms(d, entries, tau);
  for (auto j : set) terms.add(j);
  return terms.evaluate().log_z;
}

}  // namespace

void IrConfig::validate() const {
  require_config(tau > 0.0 && std::isfinite(tau), "objective: temperature must be positive");
  require_config(num_negatives >= 1, "objective: num_negatives must be at least 1");
}

std::vector<Index> intersect_sorted(std::span<const Index> a, std::span<const Index> b) {
  std::vector<Index> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

double parametric_prob(Index i, const Vector& d, const Matrix& weights) {
  check_index(i, weights);
  check_query(d, weights);
  const Vector logits = weights * d;
  const double m = logits.maxCoeff();
  const Vector e = (logits.array() - m).exp();
  return e(i) / e.sum();
}

double instance_prob_exact(Index i, const Vector& d, const Matrix& bank_entries, double tau) {
  require_config(tau > 0.0, "objective: temperature must be positive");
  check_index(i, bank_entries);
  check_query(d, bank_entries);
  const Vector logits = (bank_entries * d) / tau;
  const double m = logits.maxCoeff();
  const Vector e = (logits.array() - m).exp();
  return e(i) / e.sum();
}

double instance_prob(Index i, const Vector& d, EmbeddingBank& bank, const IrConfig& cfg) {
  cfg.validate();
  if (cfg.exact_denominator) return instance_prob_exact(i, d, bank.entries(), cfg.tau);
  check_index(i, bank.entries());
  check_query(d, bank.entries());
  const Index positive[] = {i};
  const auto z = denominator(d, bank, cfg, positive);
  return std::exp(bank.entries().row(i).dot(d) / cfg.tau - z.log_z);
}

double set_prob_exact(std::span<const Index> set, const Vector& d, const Matrix& bank_entries, double tau) {
  require_input(!set.empty(), "set_prob: empty index set");
  require_config(tau > 0.0, "objective: temperature must be positive");
  check_query(d, bank_entries);
  for (auto j : set) check_index(j, bank_entries);
  const Vector logits = (bank_entries * d) / tau;
  const double m = logits.maxCoeff();
  const Vector e = (logits.array() - m).exp();
  double numerator = 0.0;
  for (auto j : set) numerator += e(j);
  return numerator / e.sum();
}

double set_prob(std::span<const Index> set, const Vector& d, EmbeddingBank& bank, const IrConfig& cfg) {
  cfg.validate();
  if (cfg.exact_denominator) return set_prob_exact(set, d, bank.entries(), cfg.tau);
  require_input(!set.empty(), "set_prob: empty index set");
  check_query(d, bank.entries());
  for (auto j : set) check_index(j, bank.entries());
  const auto z = denominator(d, bank, cfg, set);
  return std::exp(log_sum_logits(set, d, bank.entries(), cfg.tau) - z.log_z);
}

LossAndGrads ir_loss_and_grad(std::span<const Query> batch, EmbeddingBank& bank, const IrConfig& cfg) {
  cfg.validate();
  require_input(!batch.empty(), "ir_loss: empty batch");
  const Matrix& entries = bank.entries();
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  LossAndGrads out;
  out.grads.reserve(batch.size());
  for (const auto& q : batch) {
    check_index(q.index, entries);
    check_query(q.embedding, entries);
    const Index positive[] = {q.index};
    const auto z = denominator(q.embedding, bank, cfg, positive);
    const double s_i = entries.row(q.index).dot(q.embedding) / cfg.tau;
    const double loss = z.log_z - s_i;
    if (!std::isfinite(loss)) throw NumericError("ir_loss: non-finite loss for video " + std::to_string(q.index));
    out.per_instance.push_back(loss);
    out.loss += loss * inv_b;
    out.grads.push_back(inv_b * (z.grad - entries.row(q.index).transpose() / cfg.tau));
  }
  return out;
}

LossAndGrads la_loss_and_grad(std::span<const Query> batch, const NeighborSets& neighbors, const EmbeddingBank& bank,
                              double tau) {
  require_config(tau > 0.0, "objective: temperature must be positive");
  require_input(!batch.empty(), "la_loss: empty batch");
  const Matrix& entries = bank.entries();
  require_input(neighbors.size() == static_cast<std::size_t>(entries.rows()),
                "la_loss: neighbor sets do not cover the bank");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  LossAndGrads out;
  out.grads.reserve(batch.size());
  for (const auto& q : batch) {
    check_index(q.index, entries);
    check_query(q.embedding, entries);
    const auto& background = neighbors.background[q.index];
    const auto close_bg = intersect_sorted(neighbors.close[q.index], background);
    if (close_bg.empty()) {
      throw TrainingError("la_loss: video " + std::to_string(q.index) +
                          " has no close neighbor among its background neighbors (degenerate clustering)");
    }
    double loss = 0.0;
    Vector grad = Vector::Zero(q.embedding.size());
    if (close_bg.size() != background.size()) {
      TermSet num(q.embedding, entries, tau);
      for (auto j : close_bg) num.add(j);
      TermSet den(q.embedding, entries, tau);
      for (auto j : background) den.add(j);
      const auto a = num.evaluate();
      const auto b = den.evaluate();
      // C n B is a subset of B, so the ratio is at most one; clamp rounding.
      loss = std::max(0.0, b.log_z - a.log_z);
      grad = b.grad - a.grad;
    }
    if (!std::isfinite(loss)) throw NumericError("la_loss: non-finite loss for video " + std::to_string(q.index));
    out.per_instance.push_back(loss);
    out.loss += loss * inv_b;
    out.grads.push_back(inv_b * grad);
  }
  return out;
}

double la_loss_softmax_path(Index i, const Vector& d, const NeighborSets& neighbors, const Matrix& bank_entries,
                            double tau) {
  const auto& background = neighbors.background.at(i);
  const auto close_bg = intersect_sorted(neighbors.close.at(i), background);
  if (close_bg.empty()) throw TrainingError("la_loss: video " + std::to_string(i) + " has empty C_i n B_i");
  return -std::log(set_prob_exact(close_bg, d, bank_entries, tau) / set_prob_exact(background, d, bank_entries, tau));
}

void commit_to_bank(std::span<const Query> batch, EmbeddingBank& bank) {
  for (const auto& q : batch) bank.update(q.index, q.embedding);
}

}  // namespace trajprior
