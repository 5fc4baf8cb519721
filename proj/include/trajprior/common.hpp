// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_COMMON_HPP_
#define TRAJPRIOR_COMMON_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajprior {

// Row-major so that one row is one sample, matching the on-disk layouts.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = std::uint32_t;
using Labels = std::vector<Index>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or inconsistent settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed arguments to an operation (empty bags, empty sets, mismatched sizes).
class InputError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class FittingError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// Bad magic, truncated files, unknown container entries.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Artifacts that do not fit together (checkpoint vs corpus dimensions).
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

inline void require_config(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

inline void require_input(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

}  // namespace trajprior

#endif  // TRAJPRIOR_COMMON_HPP_
