// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_PATCH_ROUTER_HPP
#define TILC_PATCH_ROUTER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tilc {

inline constexpr std::uint32_t kTargetSize = 256;

enum class Route { PassThrough, Tile, Stretch };

std::string_view to_string(Route route) noexcept;

struct RouterDecision {
  Route route = Route::PassThrough;
  std::uint32_t max_dim = 0;
  bool operator==(const RouterDecision&) const = default;
};

constexpr std::uint32_t max_dim(std::uint32_t width, std::uint32_t height) noexcept {
  return width > height ? width : height;
}

/// Size rule: exact target square passes through, anything reaching the
/// target on its long axis is tiled (mixed shapes included), the rest is
/// stretched.
RouterDecision route(std::uint32_t width, std::uint32_t height,
                     std::uint32_t target_size = kTargetSize);

struct SizeHistogram {
  std::uint32_t bin_width = 1;
  std::vector<std::uint64_t> counts;  // counts[i] covers [i*bin, (i+1)*bin)
  std::uint32_t min_size = 0;
  std::uint32_t max_size = 0;
  std::uint64_t total() const noexcept;
};

SizeHistogram histogram(std::span<const std::uint32_t> sizes,
                        std::uint32_t bin_width);
/// "bin_start,count" header plus one row per bin, empty bins included.
std::string histogram_csv(const SizeHistogram& hist);

}  // namespace tilc

#endif  // TILC_PATCH_ROUTER_HPP
