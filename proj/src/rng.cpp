// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/rng.hpp"

#include <cmath>

#include "tilc/error.hpp"

namespace tilc {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_key(std::string_view text) noexcept {
  // FNV-1a, then finalized.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return mix64(h);
}

RngStream::RngStream(std::uint64_t global_seed, std::string_view patch_key,
                     std::uint64_t counter)
    : global_seed_(global_seed),
      patch_key_(patch_key),
      key_(mix64(global_seed + kGolden) ^ hash_key(patch_key)),
      counter_(counter) {}

RngStream RngStream::fork(std::string_view sub_key) const {
  std::string key = patch_key_;
  key += '/';
  key += sub_key;
  return RngStream(global_seed_, key);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ContractError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
  // Rejection keeps every value equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t draw = next_u64();
  while (draw >= limit) draw = next_u64();
  return lo + static_cast<std::int64_t>(draw % span);
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0) || !std::isfinite(mean))
    throw ContractError("poisson: mean must be finite and >= 0");
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0) {
    const double chunk = remaining > 16.0 ? 16.0 : remaining;
    remaining -= chunk;
    const double limit = std::exp(-chunk);
    double product = uniform();
    while (product > limit) {
      ++total;
      product *= uniform();
    }
  }
  return total;
}

}  // namespace tilc
