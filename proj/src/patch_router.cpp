// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/patch_router.hpp"

#include <algorithm>

#include "tilc/error.hpp"

namespace tilc {

std::string_view to_string(Route route) noexcept {
  switch (route) {
    case Route::PassThrough: return "passthrough";
    case Route::Tile: return "tile";
    case Route::Stretch: return "stretch";
  }
  return "unknown";
}

RouterDecision route(std::uint32_t width, std::uint32_t height, std::uint32_t target_size) {
  if (target_size < 1) throw ContractError("route: target_size must be >= 1");
  const std::uint32_t longest = max_dim(width, height);
  if (width == target_size && height == target_size) return {Route::PassThrough, longest};
  if (longest >= target_size) return {Route::Tile, longest};
  return {Route::Stretch, longest};
}

std::uint64_t SizeHistogram::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

SizeHistogram histogram(std::span<const std::uint32_t> sizes, std::uint32_t bin_width) {
  if (bin_width < 1) throw ContractError("histogram: bin_width must be >= 1");
  SizeHistogram hist;
  hist.bin_width = bin_width;
  if (sizes.empty()) return hist;
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  hist.min_size = *lo;
  hist.max_size = *hi;
  hist.counts.assign(*hi / bin_width + 1, 0);
  for (auto s : sizes) ++hist.counts[s / bin_width];
  return hist;
}

std::string histogram_csv(const SizeHistogram& hist) {
  std::string out = "bin_start,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    out += std::to_string(i * hist.bin_width);
    out += ',';
    out += std::to_string(hist.counts[i]);
    out += '\n';
  }
  return out;
}

}  // namespace tilc
