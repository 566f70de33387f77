// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/stretcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tilc/error.hpp"
#include "tilc/patch_router.hpp"
#include "tilc/tiler.hpp"

namespace tilc {

PixelRect pixel_rect(const BBox& box) {
  if (box.x_min < 0 || box.y_min < 0 || box.width <= 0 || box.height <= 0)
    throw ContractError("pixel_rect: box must have non-negative origin and positive size");
  const auto x0 = static_cast<std::uint32_t>(std::floor(box.x_min));
  const auto y0 = static_cast<std::uint32_t>(std::floor(box.y_min));
  const auto x1 = static_cast<std::uint32_t>(std::ceil(box.x_max()));
  const auto y1 = static_cast<std::uint32_t>(std::ceil(box.y_max()));
  return {x0, y0, x1 - x0, y1 - y0};
}

void AugmentParams::validate() const {
  if (rotation_deg != 0 && rotation_deg != 90 && rotation_deg != 180 && rotation_deg != 270)
    throw ConfigError("rotation must be one of 0, 90, 180, 270 degrees");
  if (!(blur_sigma >= 0 && blur_sigma <= 1.5)) throw ConfigError("blur sigma must be in [0, 1.5]");
  for (int s : color_shift)
    if (s < -10 || s > 10) throw ConfigError("color shift must be in [-10, 10]");
}

PixelPatch rotate_ccw(const PixelPatch& src, int quarter_turns) {
  const int q = ((quarter_turns % 4) + 4) % 4;
  const std::uint32_t w = src.width(), h = src.height();
  if (q == 0) return src;
  if (q == 2) {
    PixelPatch out(w, h, src.mpp());
    for (std::uint32_t y = 0; y < h; ++y)
      for (std::uint32_t x = 0; x < w; ++x) out.set(x, y, src.at(w - 1 - x, h - 1 - y));
    return out;
  }
  PixelPatch out(h, w, src.mpp());
  for (std::uint32_t y = 0; y < w; ++y) {
    for (std::uint32_t x = 0; x < h; ++x) {
      // q == 1: the right column becomes the top row.
      out.set(x, y, q == 1 ? src.at(w - 1 - y, x) : src.at(y, h - 1 - x));
    }
  }
  return out;
}

PixelPatch gaussian_blur(const PixelPatch& src, double sigma) {
  if (sigma <= 0) return src;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  const double norm = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (auto& k : kernel) k /= norm;

  const int w = static_cast<int>(src.width()), h = static_cast<int>(src.height());
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int k = -radius; k <= radius; ++k) {
          const int sx = std::clamp(x + k, 0, w - 1);
          acc += kernel[k + radius] * src.px(sx, y)[c];
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  PixelPatch out(src.width(), src.height(), src.mpp());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int k = -radius; k <= radius; ++k) {
          const int sy = std::clamp(y + k, 0, h - 1);
          acc += kernel[k + radius] * tmp[(static_cast<std::size_t>(sy) * w + x) * 3 + c];
        }
        out.px(x, y)[c] = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
      }
    }
  }
  return out;
}

void apply_color_shift(PixelPatch& img, const std::array<int, 3>& shift) {
  auto samples = img.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int v = samples[i] + shift[i % 3];
    samples[i] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
  }
}

PixelPatch augment(const PixelPatch& src, const AugmentParams& params) {
  params.validate();
  PixelPatch out = gaussian_blur(rotate_ccw(src, params.rotation_deg / 90), params.blur_sigma);
  apply_color_shift(out, params.color_shift);
  return out;
}

// ---------------------------------------------------------------------------
// Mirroring

namespace {

inline std::uint32_t reflect(std::uint64_t x, std::uint32_t dim) {
  const std::uint64_t period = std::uint64_t{dim} * 2;
  const std::uint64_t m = x % period;
  return static_cast<std::uint32_t>(m < dim ? m : period - 1 - m);
}

}  // namespace

PixelPatch mirror_pixels(const PixelPatch& src, std::uint32_t out_w, std::uint32_t out_h) {
  if (out_w < src.width() || out_h < src.height())
    throw ContractError("mirror_expand: output must be at least the input size");
  PixelPatch out(out_w, out_h, src.mpp());
  std::vector<std::uint32_t> xmap(out_w);
  for (std::uint32_t x = 0; x < out_w; ++x) xmap[x] = reflect(x, src.width());
  for (std::uint32_t y = 0; y < out_h; ++y) {
    const std::uint32_t sy = reflect(y, src.height());
    std::uint8_t* row = out.px(0, y);
    for (std::uint32_t x = 0; x < out_w; ++x) {
      const std::uint8_t* p = src.px(xmap[x], sy);
      row[3 * x] = p[0];
      row[3 * x + 1] = p[1];
      row[3 * x + 2] = p[2];
    }
  }
  return out;
}

AnnotatedPatch mirror_expand(const AnnotatedPatch& src, std::uint32_t out_w,
                             std::uint32_t out_h) {
  AnnotatedPatch out{mirror_pixels(src.patch, out_w, out_h), {}, src.source_id, src.origin};
  const double w = src.patch.width(), h = src.patch.height();
  const std::uint32_t panels_x = (out_w + src.patch.width() - 1) / src.patch.width();
  const std::uint32_t panels_y = (out_h + src.patch.height() - 1) / src.patch.height();
  for (std::uint32_t ky = 0; ky < panels_y; ++ky) {
    for (std::uint32_t kx = 0; kx < panels_x; ++kx) {
      for (const auto& box : src.boxes) {
        BBox copy = box;
        copy.x_min = (kx % 2 == 0) ? kx * w + box.x_min : (kx + 1) * w - box.x_max();
        copy.y_min = (ky % 2 == 0) ? ky * h + box.y_min : (ky + 1) * h - box.y_max();
        if (contained_in(copy, out_w, out_h)) out.boxes.push_back(copy);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Compositing

void paste_crop(AnnotatedPatch& canvas, const AnnotatedPatch& donor, const PixelRect& region,
                std::uint32_t dest_x, std::uint32_t dest_y, const AugmentParams& params,
                std::uint32_t feather_px) {
  params.validate();
  if (region.w == 0 || region.h == 0 ||
      std::uint64_t{region.x} + region.w > donor.patch.width() ||
      std::uint64_t{region.y} + region.h > donor.patch.height())
    throw ContractError("paste_crop: region outside donor patch");
  const BBox region_box{double(region.x), double(region.y), double(region.w), double(region.h), 0};
  for (const auto& b : donor.boxes)
    if (intersection_area(region_box, b) > 0)
      throw ContractError("paste_crop: donor region of '" + donor.source_id +
                          "' overlaps an annotated box; crops must be background only");

  const PixelPatch crop =
      augment(donor.patch.crop(region.x, region.y, region.w, region.h), params);
  if (std::uint64_t{dest_x} + crop.width() > canvas.patch.width() ||
      std::uint64_t{dest_y} + crop.height() > canvas.patch.height())
    throw ContractError("paste_crop: destination rectangle outside canvas");

  const std::uint32_t cw = crop.width(), ch = crop.height();
  const std::uint32_t denom = feather_px + 1;
  for (std::uint32_t y = 0; y < ch; ++y) {
    for (std::uint32_t x = 0; x < cw; ++x) {
      const std::uint32_t d = std::min({x, y, cw - 1 - x, ch - 1 - y});
      const std::uint8_t* s = crop.px(x, y);
      std::uint8_t* t = canvas.patch.px(dest_x + x, dest_y + y);
      if (d >= feather_px) {
        t[0] = s[0];
        t[1] = s[1];
        t[2] = s[2];
        continue;
      }
      // alpha = (d + 1) / (feather + 1), rounded integer blend
      for (int c = 0; c < 3; ++c)
        t[c] = static_cast<std::uint8_t>((s[c] * (d + 1) + t[c] * (feather_px - d) + denom / 2) /
                                         denom);
    }
  }
}

bool transplant_cell(AnnotatedPatch& canvas, const AnnotatedPatch& donor, const BBox& donor_box,
                     std::uint32_t dest_x, std::uint32_t dest_y, double max_iou) {
  const PixelRect rect = pixel_rect(donor_box);
  if (std::uint64_t{rect.x} + rect.w > donor.patch.width() ||
      std::uint64_t{rect.y} + rect.h > donor.patch.height())
    throw ContractError("transplant_cell: donor box outside donor patch");
  if (std::uint64_t{dest_x} + rect.w > canvas.patch.width() ||
      std::uint64_t{dest_y} + rect.h > canvas.patch.height())
    throw ContractError("transplant_cell: destination outside canvas");

  BBox placed = donor_box;
  placed.x_min = dest_x + (donor_box.x_min - rect.x);
  placed.y_min = dest_y + (donor_box.y_min - rect.y);
  for (const auto& b : canvas.boxes)
    if (iou(placed, b) > max_iou) return false;

  canvas.patch.blit(donor.patch.crop(rect.x, rect.y, rect.w, rect.h), dest_x, dest_y);
  canvas.boxes.push_back(placed);
  return true;
}

AnnotatedPatch gray_pad(const AnnotatedPatch& src, std::uint32_t target_size) {
  const std::uint32_t w = src.patch.width(), h = src.patch.height();
  if (w > target_size || h > target_size)
    throw ContractError("gray_pad: '" + src.source_id + "' is larger than the target size");
  const std::uint32_t ox = (target_size - w) / 2;
  const std::uint32_t oy = (target_size - h) / 2;
  AnnotatedPatch out{PixelPatch(target_size, target_size, src.patch.mpp(),
                                {kPadGray, kPadGray, kPadGray}),
                     src.boxes, src.source_id,
                     Origin{src.origin.x - std::int64_t{ox}, src.origin.y - std::int64_t{oy}}};
  out.patch.blit(src.patch, ox, oy);
  for (auto& b : out.boxes) {
    b.x_min += ox;
    b.y_min += oy;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Donor pool

DonorPool::DonorPool(std::span<const AnnotatedPatch> patches) {
  entries_.reserve(patches.size());
  means_.reserve(patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    entries_.push_back(&p);
    means_.push_back(p.patch.mean_rgb());
    for (std::size_t b = 0; b < p.boxes.size(); ++b)
      if (contained_in(p.boxes[b], p.patch.width(), p.patch.height())) cells_.push_back({i, b});
  }
}

std::vector<std::size_t> DonorPool::ranked_by_color(const std::array<double, 3>& color,
                                                    const std::string& exclude_source) const {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i]->source_id == exclude_source) continue;
    double d = 0;
    for (int c = 0; c < 3; ++c) d += (means_[i][c] - color[c]) * (means_[i][c] - color[c]);
    scored.emplace_back(d, i);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::size_t> out;
  out.reserve(scored.size());
  for (auto& [d, i] : scored) out.push_back(i);
  return out;
}

void StretchConfig::validate() const {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (crop_cell < 1) throw ConfigError("crop_cell must be >= 1");
  if (donor_candidates < 1) throw ConfigError("donor_candidates must be >= 1");
  if (!(blur_max >= 0 && blur_max <= 1.5)) throw ConfigError("blur_max must be in [0, 1.5]");
  if (shift_max < 0 || shift_max > 10) throw ConfigError("shift_max must be in [0, 10]");
  if (!(max_iou >= 0 && max_iou <= 1)) throw ConfigError("max_iou must be in [0, 1]");
}

// ---------------------------------------------------------------------------
// Stretch composition

namespace {

bool rects_overlap(const PixelRect& a, const PixelRect& b) {
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

std::vector<PixelRect> uncovered_cells(std::uint32_t mw, std::uint32_t mh, std::uint32_t target,
                                       std::uint32_t cell) {
  std::vector<PixelRect> cells;
  auto split = [&](std::uint32_t x0, std::uint32_t y0, std::uint32_t x1, std::uint32_t y1) {
    for (std::uint32_t y = y0; y < y1; y += cell)
      for (std::uint32_t x = x0; x < x1; x += cell)
        cells.push_back({x, y, std::min(cell, x1 - x), std::min(cell, y1 - y)});
  };
  split(mw, 0, target, target);  // right strip, full height
  split(0, mh, mw, target);      // bottom strip under the mirrored block
  return cells;
}

bool fill_cell(AnnotatedPatch& canvas, const DonorPool& pool,
               std::span<const std::size_t> candidates, const PixelRect& cell, RngStream& rng,
               const StretchConfig& cfg) {
  AugmentParams params;
  params.rotation_deg = 90 * static_cast<int>(rng.uniform_int(0, 3));
  params.blur_sigma = rng.uniform(0.0, cfg.blur_max);
  for (auto& s : params.color_shift) s = static_cast<int>(rng.uniform_int(-cfg.shift_max, cfg.shift_max));
  const bool quarter = params.rotation_deg == 90 || params.rotation_deg == 270;
  const std::uint32_t rw = quarter ? cell.h : cell.w;
  const std::uint32_t rh = quarter ? cell.w : cell.h;

  for (std::size_t donor_idx : candidates) {
    const AnnotatedPatch& donor = pool.entry(donor_idx);
    if (donor.patch.width() < rw || donor.patch.height() < rh) continue;
    for (std::uint32_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
      const PixelRect region{
          static_cast<std::uint32_t>(rng.uniform_int(0, donor.patch.width() - rw)),
          static_cast<std::uint32_t>(rng.uniform_int(0, donor.patch.height() - rh)), rw, rh};
      const BBox region_box{double(region.x), double(region.y), double(rw), double(rh), 0};
      const bool clean = std::none_of(donor.boxes.begin(), donor.boxes.end(), [&](const BBox& b) {
        return intersection_area(region_box, b) > 0;
      });
      if (!clean) continue;
      paste_crop(canvas, donor, region, cell.x, cell.y, params, cfg.feather_px);
      return true;
    }
  }
  return false;
}

}  // namespace

StretchResult stretch_compose(const AnnotatedPatch& source, const DonorPool& pool, RngStream rng,
                              std::uint32_t target_size, const StretchConfig& cfg) {
  cfg.validate();
  if (pool.empty())
    throw ContractError("stretch_compose: donor pool is empty; use the padded (gray_pad) variant");
  const std::uint32_t w = source.patch.width(), h = source.patch.height();
  if (route(w, h, target_size).route != Route::Stretch)
    throw ContractError("stretch_compose: '" + source.source_id +
                        "' is not smaller than the target size");

  StretchResult result{AnnotatedPatch{mirror_pixels(source.patch, target_size, target_size), {},
                                      source.source_id, source.origin},
                       0, 0, 0, 0, 0, {}};
  result.mirror_w = std::min(2 * w, target_size);
  result.mirror_h = std::min(2 * h, target_size);
  result.patch.boxes = mirror_expand(source, result.mirror_w, result.mirror_h).boxes;
  AnnotatedPatch& canvas = result.patch;

  // Donor crops over everything the single reflection did not reach.
  RngStream crop_rng = rng.fork("crop");
  std::vector<std::size_t> ranked = pool.ranked_by_color(source.patch.mean_rgb(), source.source_id);
  if (ranked.size() > cfg.donor_candidates) ranked.resize(cfg.donor_candidates);
  for (const auto& cell :
       uncovered_cells(result.mirror_w, result.mirror_h, target_size, cfg.crop_cell)) {
    if (fill_cell(canvas, pool, ranked, cell, crop_rng, cfg))
      ++result.crops_pasted;
    else
      ++result.fallback_cells;
  }

  // Lymphocyte transplants, verbatim.
  RngStream cell_rng = rng.fork("cells");
  result.cells_requested = std::min<std::uint64_t>(cell_rng.poisson(cfg.lambda), cfg.max_cells);
  std::vector<DonorPool::CellRef> usable;
  for (const auto& ref : pool.cells()) {
    const PixelRect r = pixel_rect(pool.entry(ref.donor).boxes[ref.box]);
    if (r.w <= target_size && r.h <= target_size) usable.push_back(ref);
  }
  std::vector<PixelRect> transplanted;
  for (std::uint64_t k = 0; k < result.cells_requested && !usable.empty(); ++k) {
    for (std::uint32_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
      const auto& ref = usable[cell_rng.uniform_int(0, static_cast<std::int64_t>(usable.size()) - 1)];
      const AnnotatedPatch& donor = pool.entry(ref.donor);
      const BBox& donor_box = donor.boxes[ref.box];
      const PixelRect r = pixel_rect(donor_box);
      const PixelRect dest{static_cast<std::uint32_t>(cell_rng.uniform_int(0, target_size - r.w)),
                           static_cast<std::uint32_t>(cell_rng.uniform_int(0, target_size - r.h)),
                           r.w, r.h};
      if (std::any_of(transplanted.begin(), transplanted.end(),
                      [&](const PixelRect& t) { return rects_overlap(t, dest); }))
        continue;
      if (!transplant_cell(canvas, donor, donor_box, dest.x, dest.y, cfg.max_iou)) continue;
      transplanted.push_back(dest);
      result.transplants.push_back({ref.donor, donor_box, canvas.boxes.back()});
      break;
    }
  }

  canvas.validate();
  return result;
}

}  // namespace tilc
