// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tilc/error.hpp"

namespace tilc {

namespace {

constexpr Rgb kTissue{226, 172, 200};
constexpr Rgb kNucleus{78, 42, 112};
constexpr std::uint32_t kNoiseGrid = 32;
constexpr std::uint32_t kMaxPlacementAttempts = 50;

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

AnnotatedPatch gen_patch(RngStream& rng, std::uint32_t width, std::uint32_t height,
                         std::uint32_t n_cells, CellRadiusRange radius, double mpp) {
  if (radius.min < 1 || radius.min > radius.max)
    throw ContractError("gen_patch: cell radius range must satisfy 1 <= min <= max");
  PixelPatch patch(width, height, mpp);

  // Bilinear value noise on a coarse grid plus a little per-pixel grain.
  const std::uint32_t gw = width / kNoiseGrid + 2, gh = height / kNoiseGrid + 2;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (auto& g : grid) g = rng.uniform(-1.0, 1.0);
  for (std::uint32_t y = 0; y < height; ++y) {
    const double fy = static_cast<double>(y) / kNoiseGrid;
    const auto iy = static_cast<std::uint32_t>(fy);
    const double ty = fy - iy;
    for (std::uint32_t x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x) / kNoiseGrid;
      const auto ix = static_cast<std::uint32_t>(fx);
      const double tx = fx - ix;
      const double n00 = grid[iy * gw + ix], n10 = grid[iy * gw + ix + 1];
      const double n01 = grid[(iy + 1) * gw + ix], n11 = grid[(iy + 1) * gw + ix + 1];
      const double n = (n00 * (1 - tx) + n10 * tx) * (1 - ty) + (n01 * (1 - tx) + n11 * tx) * ty;
      const double grain = rng.uniform(-3.0, 3.0);
      patch.set(x, y,
                {clamp_u8(kTissue.r + 16 * n + grain), clamp_u8(kTissue.g + 20 * n + grain),
                 clamp_u8(kTissue.b + 12 * n + grain)});
    }
  }

  std::vector<BBox> boxes;
  if (n_cells > 0) {
    const std::uint32_t fit = (std::min(width, height) - 1) / 2;
    if (fit < radius.min)
      throw ContractError("gen_patch: " + std::to_string(width) + "x" + std::to_string(height) +
                          " patch cannot hold a cell of radius " + std::to_string(radius.min));
    const std::uint32_t rmax = std::min(radius.max, fit);
    for (std::uint32_t i = 0; i < n_cells; ++i) {
      bool placed = false;
      for (std::uint32_t attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
        const auto rx = static_cast<std::uint32_t>(rng.uniform_int(radius.min, rmax));
        const auto ry = static_cast<std::uint32_t>(
            rng.uniform_int(std::max<std::int64_t>(radius.min, std::int64_t{rx} - 2),
                            std::min<std::int64_t>(rmax, std::int64_t{rx} + 2)));
        const auto cx = static_cast<std::uint32_t>(rng.uniform_int(rx, width - 1 - rx));
        const auto cy = static_cast<std::uint32_t>(rng.uniform_int(ry, height - 1 - ry));
        const BBox box{double(cx - rx), double(cy - ry), double(2 * rx + 1), double(2 * ry + 1), 0};
        if (std::any_of(boxes.begin(), boxes.end(),
                        [&](const BBox& b) { return iou(b, box) > 0.1; }))
          continue;
        for (std::uint32_t y = cy - ry; y <= cy + ry; ++y) {
          for (std::uint32_t x = cx - rx; x <= cx + rx; ++x) {
            const double dx = (double(x) - cx) / rx, dy = (double(y) - cy) / ry;
            const double r2 = dx * dx + dy * dy;
            if (r2 > 1.0) continue;
            const double shade = 1.0 - 0.25 * (1.0 - r2) + rng.uniform(-0.05, 0.05);
            patch.set(x, y, {clamp_u8(kNucleus.r * shade), clamp_u8(kNucleus.g * shade),
                             clamp_u8(kNucleus.b * shade)});
          }
        }
        boxes.push_back(box);
        placed = true;
      }
      if (!placed)
        throw ContractError("gen_patch: could not place cell " + std::to_string(i + 1) + " of " +
                            std::to_string(n_cells) + " without overlap; request fewer cells");
    }
  }
  return AnnotatedPatch{std::move(patch), std::move(boxes), rng.patch_key(), {}};
}

std::vector<Detection> gen_detections(std::span<const BBox> gt, const DetectionSynthParams& params,
                                      double area_mm2, double width, double height,
                                      RngStream& rng) {
  if (!(params.tp_rate >= 0 && params.tp_rate <= 1))
    throw ContractError("gen_detections: tp_rate must be in [0, 1]");
  if (!(params.fp_per_mm2 >= 0) || !(params.jitter_px >= 0) || !(area_mm2 >= 0))
    throw ContractError("gen_detections: rates, jitter and area must be >= 0");

  std::vector<Detection> dets;
  for (const auto& box : gt) {
    const bool hit = rng.bernoulli(params.tp_rate);
    const double angle = rng.uniform(0.0, 2 * std::numbers::pi);
    const double r = params.jitter_px * std::sqrt(rng.uniform());
    const double conf = rng.uniform(0.5, 1.0);
    if (!hit) continue;
    dets.push_back({box.cx() + r * std::cos(angle), box.cy() + r * std::sin(angle), box.width,
                    box.height, conf, Frame::PatchLocal});
  }
  const std::uint64_t n_fp = rng.poisson(params.fp_per_mm2 * area_mm2);
  for (std::uint64_t i = 0; i < n_fp; ++i) {
    Detection d;
    d.cx = rng.uniform(0.0, width);
    d.cy = rng.uniform(0.0, height);
    d.width = rng.uniform(8.0, 20.0);
    d.height = rng.uniform(8.0, 20.0);
    d.confidence = rng.uniform(0.0, 0.5);
    dets.push_back(d);
  }
  return dets;
}

}  // namespace tilc
