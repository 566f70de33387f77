// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_TILER_HPP
#define TILC_TILER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tilc/annotation_io.hpp"

namespace tilc {

inline constexpr std::uint8_t kPadGray = 114;

struct TileWindow {
  std::uint32_t x0 = 0;
  std::uint32_t y0 = 0;
  std::uint32_t size = 0;
  bool operator==(const TileWindow&) const = default;
};

/// Stride-`target` grid plus one edge-aligned window per axis when the
/// dimension is not a multiple of the target. Row-major, no duplicates.
std::vector<TileWindow> plan_windows(std::uint32_t width, std::uint32_t height,
                                     std::uint32_t target_size);

struct ClipResult {
  std::vector<BBox> kept;   // translated to window coordinates
  std::size_t dropped = 0;  // intersecting the window but not contained
};

ClipResult clip_and_assign(const TileWindow& window, std::span<const BBox> boxes);

enum class PadMode { Mirror, Gray };

struct Tile {
  AnnotatedPatch patch;
  std::size_t dropped = 0;
};

/// Pads a short axis up to the target (mirror or gray, appended at the
/// bottom/right) and cuts one tile per planned window.
std::vector<Tile> tile(const AnnotatedPatch& source, std::uint32_t target_size,
                       PadMode pad = PadMode::Mirror);

/// "<source_id>_x<x0>_y<y0>"
std::string tile_stem(const std::string& source_id, std::uint32_t x0,
                      std::uint32_t y0);

}  // namespace tilc

#endif  // TILC_TILER_HPP
