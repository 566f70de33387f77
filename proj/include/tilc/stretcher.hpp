// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_STRETCHER_HPP
#define TILC_STRETCHER_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tilc/annotation_io.hpp"
#include "tilc/rng.hpp"

namespace tilc {

struct PixelRect {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t w = 0;
  std::uint32_t h = 0;
  bool operator==(const PixelRect&) const = default;
};

/// Smallest integer pixel rectangle covering the box.
PixelRect pixel_rect(const BBox& box);

struct AugmentParams {
  int rotation_deg = 0;             // 0, 90, 180 or 270, counter-clockwise
  double blur_sigma = 0.0;          // Gaussian, [0, 1.5]
  std::array<int, 3> color_shift{};  // per channel, [-10, 10], saturating

  void validate() const;  // ConfigError outside the declared ranges
};

PixelPatch rotate_ccw(const PixelPatch& src, int quarter_turns);
PixelPatch gaussian_blur(const PixelPatch& src, double sigma);
void apply_color_shift(PixelPatch& img, const std::array<int, 3>& shift);
PixelPatch augment(const PixelPatch& src, const AugmentParams& params);

/// Symmetric reflect-tiling (period 2·dim, edge pixel repeated) to
/// out_w × out_h. Every reflected copy of a source box that lands fully
/// inside the output is labelled.
AnnotatedPatch mirror_expand(const AnnotatedPatch& src, std::uint32_t out_w,
                             std::uint32_t out_h);
PixelPatch mirror_pixels(const PixelPatch& src, std::uint32_t out_w,
                         std::uint32_t out_h);

/// Paste an augmented, border-feathered background crop of `donor` at dest.
/// The region must not overlap any donor box; the destination rectangle
/// (after rotation) must fit inside the canvas. No boxes are added.
void paste_crop(AnnotatedPatch& canvas, const AnnotatedPatch& donor,
                const PixelRect& region, std::uint32_t dest_x,
                std::uint32_t dest_y, const AugmentParams& params,
                std::uint32_t feather_px);

/// Verbatim copy of the donor box's pixel rectangle to dest, plus a new box.
/// Returns false (canvas untouched) when the new box would exceed `max_iou`
/// with any existing canvas box.
bool transplant_cell(AnnotatedPatch& canvas, const AnnotatedPatch& donor,
                     const BBox& donor_box, std::uint32_t dest_x,
                     std::uint32_t dest_y, double max_iou = 0.1);

/// Letterbox onto a uniform gray target × target canvas.
AnnotatedPatch gray_pad(const AnnotatedPatch& src, std::uint32_t target_size);

/// Read-only view over the patches usable as crop and cell donors.
class DonorPool {
 public:
  DonorPool() = default;
  explicit DonorPool(std::span<const AnnotatedPatch> patches);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const AnnotatedPatch& entry(std::size_t i) const { return *entries_[i]; }
  const std::array<double, 3>& mean(std::size_t i) const { return means_[i]; }

  /// Donor indices by ascending squared mean-RGB distance (ties: pool order).
  /// Entries with `exclude_source` as source id are skipped.
  std::vector<std::size_t> ranked_by_color(const std::array<double, 3>& color,
                                           const std::string& exclude_source) const;

  struct CellRef {
    std::size_t donor = 0;
    std::size_t box = 0;
  };
  /// All donor boxes, in pool order.
  const std::vector<CellRef>& cells() const noexcept { return cells_; }

 private:
  std::vector<const AnnotatedPatch*> entries_;
  std::vector<std::array<double, 3>> means_;
  std::vector<CellRef> cells_;
};

struct StretchConfig {
  double lambda = 3.0;
  std::uint32_t max_cells = 8;
  std::uint32_t max_attempts = 50;
  std::uint32_t feather_px = 4;
  std::uint32_t crop_cell = 32;
  std::uint32_t donor_candidates = 16;
  double blur_max = 1.0;
  int shift_max = 8;
  double max_iou = 0.1;

  void validate() const;
};

struct TransplantRecord {
  std::size_t donor = 0;
  BBox donor_box;
  BBox placed;
};

struct StretchResult {
  AnnotatedPatch patch;
  std::uint32_t mirror_w = 0;  // extent covered by step-1 mirroring
  std::uint32_t mirror_h = 0;
  std::size_t crops_pasted = 0;
  std::size_t fallback_cells = 0;
  std::uint64_t cells_requested = 0;
  std::vector<TransplantRecord> transplants;
};

/// Mirror, fill the remainder with nearest-color donor crops, transplant
/// K = clamp(Poisson(lambda), 0, max_cells) cells. Deterministic in
/// (source, pool order, rng).
StretchResult stretch_compose(const AnnotatedPatch& source, const DonorPool& pool,
                              RngStream rng, std::uint32_t target_size,
                              const StretchConfig& config = {});

}  // namespace tilc

#endif  // TILC_STRETCHER_HPP
