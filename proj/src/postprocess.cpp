// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "tilc/error.hpp"

namespace tilc {

using json = nlohmann::json;

std::vector<Detection> size_filter(std::span<const Detection> dets, SizeBand band) {
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (const auto& d : dets) {
    if (d.width >= band.min_px && d.width <= band.max_px && d.height >= band.min_px &&
        d.height <= band.max_px)
      kept.push_back(d);
  }
  return kept;
}

std::vector<Detection> adjust_partial_centers(std::span<const Detection> dets, double patch_w,
                                              double patch_h, double border_eps) {
  std::vector<Detection> out(dets.begin(), dets.end());
  for (auto& d : out) {
    const bool left = d.x_min() <= border_eps;
    const bool right = d.x_max() >= patch_w - border_eps;
    const bool top = d.y_min() <= border_eps;
    const bool bottom = d.y_max() >= patch_h - border_eps;
    const bool x_cut = left != right;
    const bool y_cut = top != bottom;
    if (!x_cut && !y_cut) continue;

    double want_w = d.width, want_h = d.height;
    if (x_cut && y_cut) {
      want_w = want_h = std::max(d.width, d.height);
    } else if (x_cut) {
      want_w = d.height;
    } else {
      want_h = d.width;
    }
    if (x_cut && want_w > d.width) {
      const double shift = (want_w - d.width) / 2;
      d.cx += left ? -shift : shift;
      d.width = want_w;
    }
    if (y_cut && want_h > d.height) {
      const double shift = (want_h - d.height) / 2;
      d.cy += top ? -shift : shift;
      d.height = want_h;
    }
  }
  return out;
}

std::vector<Detection> to_global(std::span<const TileDetections> tiles,
                                 const std::map<std::string, Origin>& origins,
                                 double dedup_radius) {
  if (!(dedup_radius >= 0) || !std::isfinite(dedup_radius))
    throw ConfigError("dedup radius must be a finite value >= 0");

  struct Candidate {
    Detection det;
    std::size_t tile;
    Origin origin;
  };
  std::vector<Candidate> all;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    auto it = origins.find(tiles[t].tile_id);
    if (it == origins.end())
      throw ReferenceError("unknown tile '" + tiles[t].tile_id + "' (no origin recorded)");
    for (Detection d : tiles[t].detections) {
      d.cx += static_cast<double>(it->second.x);
      d.cy += static_cast<double>(it->second.y);
      d.frame = Frame::SlideGlobal;
      all.push_back({d, t, it->second});
    }
  }

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (all[a].det.confidence != all[b].det.confidence)
      return all[a].det.confidence > all[b].det.confidence;
    if (all[a].origin.y != all[b].origin.y) return all[a].origin.y < all[b].origin.y;
    return all[a].origin.x < all[b].origin.x;
  });

  // Uniform grid over accepted centers; a neighbour within the radius is in
  // one of the 3x3 surrounding cells.
  const double cell = dedup_radius > 0 ? dedup_radius : 1.0;
  auto cell_key = [cell](double x, double y) {
    const auto cx = static_cast<std::int64_t>(std::floor(x / cell));
    const auto cy = static_cast<std::int64_t>(std::floor(y / cell));
    return std::pair{cx, cy};
  };
  struct PairHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const noexcept {
      return std::hash<std::int64_t>()(p.first * 73856093 ^ p.second * 19349663);
    }
  };
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, PairHash> grid;
  std::vector<bool> keep(all.size(), false);
  const double r2 = dedup_radius * dedup_radius;

  for (std::size_t idx : order) {
    const Candidate& c = all[idx];
    const auto [gx, gy] = cell_key(c.det.cx, c.det.cy);
    bool suppressed = false;
    for (std::int64_t dy = -1; dy <= 1 && !suppressed; ++dy) {
      for (std::int64_t dx = -1; dx <= 1 && !suppressed; ++dx) {
        auto it = grid.find({gx + dx, gy + dy});
        if (it == grid.end()) continue;
        for (std::size_t other : it->second) {
          if (all[other].tile == c.tile) continue;
          const double ddx = all[other].det.cx - c.det.cx;
          const double ddy = all[other].det.cy - c.det.cy;
          if (ddx * ddx + ddy * ddy <= r2) {
            suppressed = true;
            break;
          }
        }
      }
    }
    if (suppressed) continue;
    keep[idx] = true;
    grid[{gx, gy}].push_back(idx);
  }

  std::vector<Detection> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep[i]) out.push_back(all[i].det);
  return out;
}

std::vector<PredictionRecord> parse_predictions(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed predictions JSON: ") + e.what(), e.byte);
  }
  if (!root.is_array()) throw SchemaError("predictions root must be an array");
  std::vector<PredictionRecord> out;
  out.reserve(root.size());
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string where = "predictions[" + std::to_string(i) + "]";
    const json& rec = root[i];
    if (!rec.is_object()) throw SchemaError("'" + where + "' must be an object");
    PredictionRecord r;
    auto id = rec.find("image_id");
    if (id == rec.end()) throw SchemaError("missing required field '" + where + ".image_id'");
    if (id->is_string()) {
      r.image_id = id->get<std::string>();
    } else if (id->is_number_integer()) {
      r.image_id = std::to_string(id->get<std::int64_t>());
      r.numeric_id = true;
    } else {
      throw SchemaError("field '" + where + ".image_id' must be a string or integer");
    }
    auto dets = rec.find("detections");
    if (dets == rec.end() || !dets->is_array())
      throw SchemaError("field '" + where + ".detections' must be an array");
    for (std::size_t j = 0; j < dets->size(); ++j) {
      const std::string dw = where + ".detections[" + std::to_string(j) + "]";
      const json& d = (*dets)[j];
      auto num = [&](const char* f) {
        auto it = d.find(f);
        if (!d.is_object() || it == d.end())
          throw SchemaError("missing required field '" + dw + "." + f + "'");
        if (!it->is_number()) throw SchemaError("field '" + dw + "." + f + "' must be a number");
        return it->get<double>();
      };
      Detection det;
      det.cx = num("cx");
      det.cy = num("cy");
      det.width = num("w");
      det.height = num("h");
      det.confidence = num("confidence");
      if (!(det.width > 0) || !(det.height > 0))
        throw SchemaError("'" + dw + "' must have positive w and h");
      if (!(det.confidence >= 0 && det.confidence <= 1))
        throw SchemaError("'" + dw + ".confidence' must be in [0, 1]");
      r.detections.push_back(det);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string emit_predictions(std::span<const PredictionRecord> records) {
  json root = json::array();
  for (const auto& r : records) {
    json dets = json::array();
    for (const auto& d : r.detections)
      dets.push_back(
          {{"cx", d.cx}, {"cy", d.cy}, {"w", d.width}, {"h", d.height}, {"confidence", d.confidence}});
    json rec;
    if (r.numeric_id)
      rec["image_id"] = std::stoll(r.image_id);
    else
      rec["image_id"] = r.image_id;
    rec["detections"] = std::move(dets);
    root.push_back(std::move(rec));
  }
  return root.dump(1) + "\n";
}

}  // namespace tilc
