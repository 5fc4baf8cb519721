// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used as test oracles. None of these
// share code with the library beyond the basic types.

#ifndef TRAJPRIOR_TESTS_ORACLES_HPP_
#define TRAJPRIOR_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "trajprior/common.hpp"

namespace trajprior::oracle {

inline Vector random_unit(std::mt19937_64& gen, Eigen::Index dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = n(gen);
  return v / v.norm();
}

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(gen);
  }
  return m;
}

inline Matrix random_unit_rows(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  Matrix m = random_matrix(gen, rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) m.row(i) /= m.row(i).norm();
  return m;
}

// Central finite-difference gradient of f at x.
inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  Vector y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y(i) = x(i) + h;
    const double up = f(y);
    y(i) = x(i) - h;
    const double down = f(y);
    y(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

// max_i |a_i - b_i| / max(|a|_inf, |b|_inf, floor)
inline double relative_error(const Vector& a, const Vector& b, double floor = 1e-8) {
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), floor});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

// NMI from the contingency table, written out term by term.
inline double brute_force_nmi(const Labels& u, const Labels& v) {
  const double n = static_cast<double>(u.size());
  std::map<Index, double> cu, cv;
  std::map<std::pair<Index, Index>, double> joint;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cu[u[i]] += 1;
    cv[v[i]] += 1;
    joint[{u[i], v[i]}] += 1;
  }
  double hu = 0.0, hv = 0.0, mi = 0.0;
  for (auto& [k, c] : cu) hu -= c / n * std::log(c / n);
  for (auto& [k, c] : cv) hv -= c / n * std::log(c / n);
  for (auto& [k, c] : joint) mi += c / n * std::log((c / n) / ((cu[k.first] / n) * (cv[k.second] / n)));
  if (hu + hv == 0.0) return 1.0;
  return 2.0 * mi / (hu + hv);
}

// Direct per-trajectory Fisher vector: responsibilities from explicit Gaussian
// densities (no log-domain tricks), then the gradient blocks.
inline Vector direct_fisher(const Vector& x, const Vector& w, const Matrix& mu, const Matrix& sigma) {
  const auto k = w.size();
  const auto d = mu.cols();
  Vector dens(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    double p = w(c);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double z = (x(j) - mu(c, j)) / sigma(c, j);
      p *= std::exp(-0.5 * z * z) / (std::sqrt(2.0 * M_PI) * sigma(c, j));
    }
    dens(c) = p;
  }
  const Vector gamma = dens / dens.sum();
  Vector out(2 * k * d);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double s = gamma(c) / std::sqrt(w(c));
    for (Eigen::Index j = 0; j < d; ++j) {
      const double phi = (x(j) - mu(c, j)) / sigma(c, j);
      out(c * 2 * d + j) = s * phi;
      out(c * 2 * d + d + j) = s * (phi * phi - 1.0) / std::sqrt(2.0);
    }
  }
  return out;
}

}  // namespace trajprior::oracle

#endif  // TRAJPRIOR_TESTS_ORACLES_HPP_
