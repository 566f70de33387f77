// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_FROC_HPP
#define TILC_FROC_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tilc {

struct Point2 {
  double x = 0;
  double y = 0;
};

struct ScoredPoint {
  double x = 0;
  double y = 0;
  double confidence = 0;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (gt, det)
  std::vector<bool> det_is_tp;                             // by det index
};

/// Greedy one-to-one center matching. Detections are visited by descending
/// confidence (ties: input order); each takes the nearest unmatched GT within
/// hit_radius (ties: lowest GT index) or counts as a false positive.
MatchResult match_greedy(std::span<const Point2> gt,
                         std::span<const ScoredPoint> dets, double hit_radius);

struct FrocImage {
  std::vector<Point2> gt;
  std::vector<ScoredPoint> dets;
  double area_mm2 = 0;
};

struct FrocPoint {
  double threshold = 0;
  double fp_per_mm2 = 0;
  double sensitivity = 0;
};

struct FrocCurve {
  std::vector<FrocPoint> points;  // descending threshold
  double total_area_mm2 = 0;
  std::size_t total_gt = 0;
};

struct FrocConfig {
  double hit_radius = 8.0;
  double mpp = 0.5;
  std::vector<double> operating_points{10, 20, 50, 100, 200, 300};

  void validate() const;  // ConfigError
};

/// Area of a width × height pixel image in mm² at `mpp` microns per pixel.
double area_mm2(double width_px, double height_px, double mpp) noexcept;

/// Pooled FROC curve: one point per distinct confidence, counts summed over
/// all images. One greedy pass per image suffices because the detections
/// kept at a lower threshold extend the visit order of a higher one.
FrocCurve froc_curve(std::span<const FrocImage> images, double hit_radius);

/// Mean over operating points of the step-function sensitivity (last point
/// with fp_per_mm2 <= op, 0 if none).
double froc_score(const FrocCurve& curve, std::span<const double> operating_points);

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

PrecisionRecall precision_recall(std::span<const Point2> gt,
                                 std::span<const ScoredPoint> dets,
                                 double hit_radius, double conf_threshold);
/// Pooled over images.
PrecisionRecall precision_recall(std::span<const FrocImage> images,
                                 double hit_radius, double conf_threshold);

/// "threshold,fp_per_mm2,sensitivity" rows.
std::string froc_csv(const FrocCurve& curve);

}  // namespace tilc

#endif  // TILC_FROC_HPP
