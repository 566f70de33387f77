// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/froc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tilc/error.hpp"

namespace tilc {

MatchResult match_greedy(std::span<const Point2> gt, std::span<const ScoredPoint> dets,
                         double hit_radius) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });

  MatchResult result;
  result.det_is_tp.assign(dets.size(), false);
  std::vector<bool> taken(gt.size(), false);
  const double r2 = hit_radius * hit_radius;
  for (std::size_t d : order) {
    std::size_t best = gt.size();
    double best_d2 = 0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (taken[g]) continue;
      const double dx = gt[g].x - dets[d].x;
      const double dy = gt[g].y - dets[d].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 <= r2 && (best == gt.size() || d2 < best_d2)) {
        best = g;
        best_d2 = d2;
      }
    }
    if (best < gt.size()) {
      taken[best] = true;
      result.det_is_tp[d] = true;
      result.pairs.emplace_back(best, d);
      ++result.tp;
    } else {
      ++result.fp;
    }
  }
  result.fn = gt.size() - result.tp;
  return result;
}

void FrocConfig::validate() const {
  if (!(hit_radius > 0)) throw ConfigError("hit radius must be > 0");
  if (!(mpp > 0)) throw ConfigError("mpp must be > 0");
  if (operating_points.empty()) throw ConfigError("at least one operating point is required");
  for (std::size_t i = 0; i < operating_points.size(); ++i) {
    if (!(operating_points[i] > 0)) throw ConfigError("operating points must be > 0");
    if (i > 0 && !(operating_points[i] > operating_points[i - 1]))
      throw ConfigError("operating points must be strictly increasing");
  }
}

double area_mm2(double width_px, double height_px, double mpp) noexcept {
  const double mm_per_px = mpp / 1000.0;
  return width_px * height_px * mm_per_px * mm_per_px;
}

FrocCurve froc_curve(std::span<const FrocImage> images, double hit_radius) {
  FrocCurve curve;
  struct Scored {
    double confidence;
    bool tp;
  };
  std::vector<Scored> all;
  for (const auto& img : images) {
    if (!(img.area_mm2 > 0)) throw ContractError("froc_curve: image area must be > 0");
    curve.total_area_mm2 += img.area_mm2;
    curve.total_gt += img.gt.size();
    const MatchResult m = match_greedy(img.gt, img.dets, hit_radius);
    for (std::size_t d = 0; d < img.dets.size(); ++d)
      all.push_back({img.dets[d].confidence, m.det_is_tp[d]});
  }
  if (curve.total_gt == 0)
    throw ContractError("froc_curve: sensitivity is undefined without ground truth");

  std::stable_sort(all.begin(), all.end(),
                   [](const Scored& a, const Scored& b) { return a.confidence > b.confidence; });
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    const double c = all[i].confidence;
    for (; i < all.size() && all[i].confidence == c; ++i) (all[i].tp ? tp : fp) += 1;
    curve.points.push_back({c, static_cast<double>(fp) / curve.total_area_mm2,
                            static_cast<double>(tp) / static_cast<double>(curve.total_gt)});
  }
  return curve;
}

double froc_score(const FrocCurve& curve, std::span<const double> operating_points) {
  if (operating_points.empty()) throw ConfigError("at least one operating point is required");
  double sum = 0;
  for (double op : operating_points) {
    double sens = 0;
    for (const auto& p : curve.points) {
      if (p.fp_per_mm2 <= op) sens = p.sensitivity;
      else break;
    }
    sum += sens;
  }
  return sum / static_cast<double>(operating_points.size());
}

namespace {

PrecisionRecall finish(std::size_t tp, std::size_t fp, std::size_t fn) {
  PrecisionRecall pr;
  pr.tp = tp;
  pr.fp = fp;
  pr.fn = fn;
  pr.precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  pr.recall = (tp + fn) == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return pr;
}

std::vector<ScoredPoint> above(std::span<const ScoredPoint> dets, double threshold) {
  std::vector<ScoredPoint> kept;
  for (const auto& d : dets)
    if (d.confidence >= threshold) kept.push_back(d);
  return kept;
}

}  // namespace

PrecisionRecall precision_recall(std::span<const Point2> gt, std::span<const ScoredPoint> dets,
                                 double hit_radius, double conf_threshold) {
  const MatchResult m = match_greedy(gt, above(dets, conf_threshold), hit_radius);
  return finish(m.tp, m.fp, m.fn);
}

PrecisionRecall precision_recall(std::span<const FrocImage> images, double hit_radius,
                                 double conf_threshold) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& img : images) {
    const MatchResult m = match_greedy(img.gt, above(img.dets, conf_threshold), hit_radius);
    tp += m.tp;
    fp += m.fp;
    fn += m.fn;
  }
  return finish(tp, fp, fn);
}

std::string froc_csv(const FrocCurve& curve) {
  std::string out = "threshold,fp_per_mm2,sensitivity\n";
  char line[128];
  for (const auto& p : curve.points) {
    const int n = std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f\n", p.threshold, p.fp_per_mm2,
                                p.sensitivity);
    out.append(line, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace tilc
