// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_POSTPROCESS_HPP
#define TILC_POSTPROCESS_HPP

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tilc/annotation_io.hpp"

namespace tilc {

enum class Frame { PatchLocal, SlideGlobal };

struct Detection {
  double cx = 0;
  double cy = 0;
  double width = 0;
  double height = 0;
  double confidence = 0;
  Frame frame = Frame::PatchLocal;

  double x_min() const noexcept { return cx - width / 2; }
  double y_min() const noexcept { return cy - height / 2; }
  double x_max() const noexcept { return cx + width / 2; }
  double y_max() const noexcept { return cy + height / 2; }
  bool operator==(const Detection&) const = default;
};

struct SizeBand {
  double min_px = 8;
  double max_px = 20;
};

/// Keeps detections with both extents inside [min_px, max_px]; order kept.
std::vector<Detection> size_filter(std::span<const Detection> dets,
                                   SizeBand band = {});

/// Border-truncated detections are assumed round: the truncated extent is
/// grown to the other extent and the center moves toward the border by half
/// the growth. An axis is truncated when exactly one of its borders is within
/// `border_eps`; a corner contact grows both axes to max(w, h).
std::vector<Detection> adjust_partial_centers(std::span<const Detection> dets,
                                              double patch_w, double patch_h,
                                              double border_eps = 0.5);

struct TileDetections {
  std::string tile_id;
  std::vector<Detection> detections;
};

/// Translate tile-local detections by their tile origin and drop cross-tile
/// duplicates: within `dedup_radius` only the highest-confidence detection
/// survives (ties: lowest origin, row-major). Detections from the same tile
/// never suppress each other. Unknown tile ids throw ReferenceError.
std::vector<Detection> to_global(std::span<const TileDetections> tiles,
                                 const std::map<std::string, Origin>& origins,
                                 double dedup_radius = 4.0);

// Prediction files: [{"image_id": ..., "detections": [{cx, cy, w, h,
// confidence}]}]. image_id may be a string or an integer.

struct PredictionRecord {
  std::string image_id;
  bool numeric_id = false;
  std::vector<Detection> detections;
};

std::vector<PredictionRecord> parse_predictions(std::string_view json_text);
std::string emit_predictions(std::span<const PredictionRecord> records);

}  // namespace tilc

#endif  // TILC_POSTPROCESS_HPP
