// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_RNG_HPP
#define TILC_RNG_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace tilc {

/// Counter-based random stream. Output i is a pure function of
/// (global_seed, patch_key, i); there is no shared state between streams,
/// so patches can be processed in any order on any number of threads.
///
/// The samplers below are implemented here rather than taken from <random>
/// because standard distributions are not specified bit-for-bit.
class RngStream {
 public:
  RngStream(std::uint64_t global_seed, std::string_view patch_key,
            std::uint64_t counter = 0);

  /// Derive an independent child stream (e.g. one per transplant attempt).
  RngStream fork(std::string_view sub_key) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in the closed range [lo, hi]. Unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform() < p; }
  /// Poisson draw. Large means are split into additive chunks so the
  /// product-of-uniforms method never underflows.
  std::uint64_t poisson(double mean);

  std::uint64_t global_seed() const noexcept { return global_seed_; }
  const std::string& patch_key() const noexcept { return patch_key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t global_seed_;
  std::string patch_key_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t hash_key(std::string_view text) noexcept;

}  // namespace tilc

#endif  // TILC_RNG_HPP
