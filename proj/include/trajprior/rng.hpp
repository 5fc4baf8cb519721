// Copyright 2026 The trajprior Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRAJPRIOR_RNG_HPP_
#define TRAJPRIOR_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace trajprior {

// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t x);

// Derives a sub-seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions are implemented here
// so that draws are identical across standard library implementations and
// the full state is the engine state alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate is discarded so that
  // no cached value needs to be carried in the state.
  double normal();

  std::string state() const;
  void set_state(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trajprior

#endif  // TRAJPRIOR_RNG_HPP_
