// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/tiler.hpp"

#include <algorithm>

#include "tilc/error.hpp"
#include "tilc/patch_router.hpp"
#include "tilc/stretcher.hpp"

namespace tilc {

namespace {

std::vector<std::uint32_t> axis_offsets(std::uint32_t dim, std::uint32_t target) {
  std::vector<std::uint32_t> offsets;
  for (std::uint32_t off = 0; std::uint64_t{off} + target <= dim; off += target)
    offsets.push_back(off);
  if (dim % target != 0) offsets.push_back(dim - target);
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  return offsets;
}

}  // namespace

std::vector<TileWindow> plan_windows(std::uint32_t width, std::uint32_t height,
                                     std::uint32_t target_size) {
  if (target_size < 1) throw ContractError("plan_windows: target_size must be >= 1");
  if (width < target_size || height < target_size)
    throw ContractError("plan_windows: " + std::to_string(width) + "x" + std::to_string(height) +
                        " is smaller than the " + std::to_string(target_size) +
                        " tile on at least one axis; pad first");
  std::vector<TileWindow> windows;
  const auto xs = axis_offsets(width, target_size);
  const auto ys = axis_offsets(height, target_size);
  windows.reserve(xs.size() * ys.size());
  for (auto y : ys)
    for (auto x : xs) windows.push_back({x, y, target_size});
  return windows;
}

ClipResult clip_and_assign(const TileWindow& window, std::span<const BBox> boxes) {
  ClipResult result;
  const BBox frame{double(window.x0), double(window.y0), double(window.size),
                   double(window.size), 0};
  for (const auto& box : boxes) {
    const bool inside = box.x_min >= frame.x_min && box.y_min >= frame.y_min &&
                        box.x_max() <= frame.x_max() && box.y_max() <= frame.y_max();
    if (inside) {
      BBox local = box;
      local.x_min -= window.x0;
      local.y_min -= window.y0;
      result.kept.push_back(local);
    } else if (intersection_area(box, frame) > 0) {
      ++result.dropped;
    }
  }
  return result;
}

std::vector<Tile> tile(const AnnotatedPatch& source, std::uint32_t target_size, PadMode pad) {
  const RouterDecision decision = route(source.patch.width(), source.patch.height(), target_size);
  if (decision.route == Route::Stretch)
    throw ContractError("tile: '" + source.source_id + "' is smaller than the tile size");

  const std::uint32_t padded_w = std::max(source.patch.width(), target_size);
  const std::uint32_t padded_h = std::max(source.patch.height(), target_size);

  AnnotatedPatch padded = [&] {
    if (padded_w == source.patch.width() && padded_h == source.patch.height()) return source;
    if (pad == PadMode::Mirror) return mirror_expand(source, padded_w, padded_h);
    AnnotatedPatch out{PixelPatch(padded_w, padded_h, source.patch.mpp(),
                                  {kPadGray, kPadGray, kPadGray}),
                       source.boxes, source.source_id, source.origin};
    out.patch.blit(source.patch, 0, 0);
    return out;
  }();

  std::vector<Tile> tiles;
  for (const auto& window : plan_windows(padded_w, padded_h, target_size)) {
    ClipResult clip = clip_and_assign(window, padded.boxes);
    Tile t{AnnotatedPatch{padded.patch.crop(window.x0, window.y0, window.size, window.size),
                          std::move(clip.kept), source.source_id,
                          Origin{source.origin.x + window.x0, source.origin.y + window.y0}},
           clip.dropped};
    tiles.push_back(std::move(t));
  }
  return tiles;
}

std::string tile_stem(const std::string& source_id, std::uint32_t x0, std::uint32_t y0) {
  return source_id + "_x" + std::to_string(x0) + "_y" + std::to_string(y0);
}

}  // namespace tilc
