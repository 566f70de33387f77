// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_SYNTH_HPP
#define TILC_SYNTH_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "tilc/annotation_io.hpp"
#include "tilc/postprocess.hpp"
#include "tilc/rng.hpp"

namespace tilc {

struct CellRadiusRange {
  std::uint32_t min = 4;
  std::uint32_t max = 10;
};

/// Pseudo-tissue patch: low-frequency pink background with dark-purple
/// elliptical cells. Boxes are the ellipse bounding boxes, pairwise IoU <= 0.1.
AnnotatedPatch gen_patch(RngStream& rng, std::uint32_t width, std::uint32_t height,
                         std::uint32_t n_cells, CellRadiusRange radius = {},
                         double mpp = kDefaultMpp);

struct DetectionSynthParams {
  double tp_rate = 1.0;
  double fp_per_mm2 = 0.0;
  double jitter_px = 0.0;
};

/// TPs: each GT kept with probability tp_rate, center moved uniformly inside a
/// disc of radius jitter_px, confidence ~ U[0.5, 1]. FPs: Poisson(fp × area)
/// uniform positions in the width × height frame, confidence ~ U[0, 0.5).
std::vector<Detection> gen_detections(std::span<const BBox> gt,
                                      const DetectionSynthParams& params,
                                      double area_mm2, double width, double height,
                                      RngStream& rng);

}  // namespace tilc

#endif  // TILC_SYNTH_HPP
