// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tilc/error.hpp"
#include "tilc/postprocess.hpp"
#include "tilc/rng.hpp"

namespace tilc {
namespace {

Detection det(double cx, double cy, double w, double h, double conf = 0.5) {
  return {cx, cy, w, h, conf, Frame::PatchLocal};
}

// ---------------------------------------------------------------- size band

TEST(SizeFilter, Examples) {
  const std::vector<Detection> dets{det(50, 50, 8, 8), det(60, 60, 7, 12), det(70, 70, 12, 21),
                                    det(80, 80, 20, 20)};
  const auto kept = size_filter(dets);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], dets[0]);
  EXPECT_EQ(kept[1], dets[3]);
}

TEST(SizeFilter, CustomBand) {
  const std::vector<Detection> dets{det(0, 0, 5, 5), det(0, 0, 30, 30)};
  EXPECT_EQ(size_filter(dets, {4, 6}).size(), 1u);
  EXPECT_TRUE(size_filter({}, {}).empty());
}

// ---------------------------------------------------------------- partial boxes

TEST(AdjustPartialCenters, LeftBorder) {
  const std::vector<Detection> dets{det(3, 100, 6, 12)};
  const auto out = adjust_partial_centers(dets, 256, 256);
  EXPECT_DOUBLE_EQ(out[0].cx, 0);
  EXPECT_DOUBLE_EQ(out[0].width, 12);
  EXPECT_DOUBLE_EQ(out[0].cy, 100);
  EXPECT_DOUBLE_EQ(out[0].height, 12);
}

TEST(AdjustPartialCenters, InteriorUnchanged) {
  const std::vector<Detection> dets{det(100, 100, 12, 12)};
  EXPECT_EQ(adjust_partial_centers(dets, 256, 256), dets);
}

TEST(AdjustPartialCenters, BottomBorder) {
  const double H = 256;
  const std::vector<Detection> dets{det(100, H - 5, 14, 10)};
  const auto out = adjust_partial_centers(dets, 256, H);
  // Growth of 4 on the truncated axis moves the center 2 px toward the border.
  EXPECT_DOUBLE_EQ(out[0].cy, H - 3);
  EXPECT_DOUBLE_EQ(out[0].height, 14);
  EXPECT_DOUBLE_EQ(out[0].cx, 100);
  EXPECT_DOUBLE_EQ(out[0].width, 14);
}

TEST(AdjustPartialCenters, RightAndTopBorders) {
  const std::vector<Detection> dets{det(253, 100, 6, 10), det(100, 2, 12, 4)};
  const auto out = adjust_partial_centers(dets, 256, 256);
  EXPECT_DOUBLE_EQ(out[0].cx, 255);
  EXPECT_DOUBLE_EQ(out[0].width, 10);
  EXPECT_DOUBLE_EQ(out[1].cy, -2);
  EXPECT_DOUBLE_EQ(out[1].height, 12);
}

TEST(AdjustPartialCenters, CornerGrowsBothAxes) {
  const std::vector<Detection> dets{det(3, 4, 6, 8)};
  const auto out = adjust_partial_centers(dets, 256, 256);
  EXPECT_DOUBLE_EQ(out[0].width, 8);
  EXPECT_DOUBLE_EQ(out[0].height, 8);
  EXPECT_DOUBLE_EQ(out[0].cx, 2);
  EXPECT_DOUBLE_EQ(out[0].cy, 4);
}

TEST(AdjustPartialCenters, EpsilonAndSpanningBoxes) {
  // 0.4 px from the left border is contact with the default epsilon.
  const std::vector<Detection> near{det(3.4, 100, 6, 12)};
  EXPECT_DOUBLE_EQ(adjust_partial_centers(near, 256, 256)[0].width, 12);
  const std::vector<Detection> far{det(3.6, 100, 6, 12)};
  EXPECT_EQ(adjust_partial_centers(far, 256, 256), far);
  // A box touching both left and right is not truncated on x.
  const std::vector<Detection> spanning{det(5, 2, 10, 4)};
  const auto out = adjust_partial_centers(spanning, 10, 100);
  EXPECT_DOUBLE_EQ(out[0].width, 10);
  EXPECT_DOUBLE_EQ(out[0].cx, 5);
  EXPECT_DOUBLE_EQ(out[0].height, 10);
  EXPECT_DOUBLE_EQ(out[0].cy, -1);
  // Extents are never shrunk.
  const std::vector<Detection> wide{det(3, 100, 6, 4)};
  EXPECT_EQ(adjust_partial_centers(wide, 256, 256), wide);
}

// ---------------------------------------------------------------- properties

std::vector<Detection> random_dets(RngStream& rng, std::size_t n, double size) {
  std::vector<Detection> out;
  for (std::size_t i = 0; i < n; ++i) {
    Detection d;
    d.width = rng.uniform(0.5, 30);
    d.height = rng.uniform(0.5, 30);
    // Half the detections hug a border.
    if (rng.bernoulli(0.5)) {
      switch (rng.uniform_int(0, 3)) {
        case 0: d.cx = d.width / 2 + rng.uniform(-0.5, 0.5); d.cy = rng.uniform(0, size); break;
        case 1: d.cx = size - d.width / 2; d.cy = rng.uniform(0, size); break;
        case 2: d.cy = d.height / 2; d.cx = rng.uniform(0, size); break;
        default: d.cy = size - d.height / 2 + rng.uniform(-0.5, 0.5); d.cx = rng.uniform(0, size);
      }
    } else {
      d.cx = rng.uniform(0, size);
      d.cy = rng.uniform(0, size);
    }
    // Integer-valued extents on a quarter of the samples hit the band edges.
    if (rng.bernoulli(0.25)) {
      d.width = static_cast<double>(rng.uniform_int(6, 22));
      d.height = static_cast<double>(rng.uniform_int(6, 22));
    }
    d.confidence = rng.uniform();
    out.push_back(d);
  }
  return out;
}

TEST(PostprocessProperty, FilterKeepsExactlyTheBand) {
  RngStream rng(31, "filter");
  for (int t = 0; t < 200; ++t) {
    const auto dets = random_dets(rng, 50, 256);
    const auto kept = size_filter(dets);
    std::vector<Detection> expected;
    for (const auto& d : dets)
      if (8 <= d.width && d.width <= 20 && 8 <= d.height && d.height <= 20) expected.push_back(d);
    ASSERT_EQ(kept, expected);
    ASSERT_EQ(size_filter(kept), kept);
  }
}

TEST(PostprocessProperty, AdjustIsIdempotent) {
  RngStream rng(32, "adjust");
  for (int t = 0; t < 200; ++t) {
    const auto dets = random_dets(rng, 50, 256);
    const auto once = adjust_partial_centers(dets, 256, 256);
    ASSERT_EQ(adjust_partial_centers(once, 256, 256), once);
  }
}

// ---------------------------------------------------------------- stitching

TEST(ToGlobal, TranslatesByOrigin) {
  const std::vector<TileDetections> tiles{{"t1", {det(4, 10, 10, 10, 0.9)}}};
  const auto out = to_global(tiles, {{"t1", {256, 0}}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].cx, 260);
  EXPECT_DOUBLE_EQ(out[0].cy, 10);
  EXPECT_EQ(out[0].frame, Frame::SlideGlobal);
}

TEST(ToGlobal, CrossTileDuplicateKeepsHighestConfidence) {
  const std::vector<TileDetections> tiles{{"a", {det(100, 50, 10, 10, 0.8)}},
                                          {"b", {det(101 - 44, 50, 10, 10, 0.9)}}};
  const auto out = to_global(tiles, {{"a", {0, 0}}, {"b", {44, 0}}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.9);
  EXPECT_DOUBLE_EQ(out[0].cx, 101);
}

TEST(ToGlobal, DistantCellsBothKept) {
  const std::vector<TileDetections> tiles{{"a", {det(100, 50, 10, 10, 0.8)}},
                                          {"b", {det(150 - 44, 50, 10, 10, 0.9)}}};
  EXPECT_EQ(to_global(tiles, {{"a", {0, 0}}, {"b", {44, 0}}}).size(), 2u);
}

TEST(ToGlobal, TieGoesToLowestOriginRowMajor) {
  const std::vector<TileDetections> tiles{{"right", {det(1, 10, 10, 10, 0.7)}},
                                          {"below", {det(100, 1, 10, 10, 0.7)}},
                                          {"first", {det(100, 10, 10, 10, 0.7)}}};
  const auto out = to_global(tiles, {{"right", {100, 0}}, {"below", {0, 10}}, {"first", {0, 0}}});
  ASSERT_EQ(out.size(), 1u);
  // All three coincide at (101, 10) or (100, 11); the (0, 0) tile wins.
  EXPECT_DOUBLE_EQ(out[0].cx, 100);
  EXPECT_DOUBLE_EQ(out[0].cy, 10);
}

TEST(ToGlobal, SameTileNeverSuppressed) {
  const std::vector<TileDetections> tiles{{"a", {det(10, 10, 9, 9, 0.9), det(11, 10, 9, 9, 0.8)}}};
  EXPECT_EQ(to_global(tiles, {{"a", {0, 0}}}).size(), 2u);
}

TEST(ToGlobal, UnknownTileIsReferenceError) {
  const std::vector<TileDetections> tiles{{"ghost", {det(1, 1, 9, 9)}}};
  EXPECT_THROW(to_global(tiles, {{"a", {0, 0}}}), ReferenceError);
}

// Brute-force reference for the grid-accelerated pass.
std::vector<Detection> to_global_oracle(const std::vector<TileDetections>& tiles,
                                        const std::map<std::string, Origin>& origins, double r) {
  struct C {
    Detection d;
    std::size_t tile;
    Origin o;
    std::size_t idx;
  };
  std::vector<C> all;
  for (std::size_t t = 0; t < tiles.size(); ++t)
    for (Detection d : tiles[t].detections) {
      const Origin o = origins.at(tiles[t].tile_id);
      d.cx += o.x;
      d.cy += o.y;
      d.frame = Frame::SlideGlobal;
      all.push_back({d, t, o, all.size()});
    }
  auto order = all;
  std::stable_sort(order.begin(), order.end(), [](const C& a, const C& b) {
    if (a.d.confidence != b.d.confidence) return a.d.confidence > b.d.confidence;
    if (a.o.y != b.o.y) return a.o.y < b.o.y;
    return a.o.x < b.o.x;
  });
  std::vector<bool> keep(all.size(), false);
  std::vector<C> accepted;
  for (const auto& c : order) {
    bool hit = false;
    for (const auto& a : accepted)
      hit |= a.tile != c.tile && std::hypot(a.d.cx - c.d.cx, a.d.cy - c.d.cy) <= r;
    if (!hit) {
      accepted.push_back(c);
      keep[c.idx] = true;
    }
  }
  std::vector<Detection> out;
  for (const auto& c : all)
    if (keep[c.idx]) out.push_back(c.d);
  return out;
}

TEST(ToGlobalProperty, MatchesBruteForceAndNeverGrows) {
  RngStream rng(33, "stitch");
  for (int t = 0; t < 100; ++t) {
    std::vector<TileDetections> tiles;
    std::map<std::string, Origin> origins;
    const auto n_tiles = rng.uniform_int(1, 6);
    std::size_t total = 0;
    for (std::int64_t k = 0; k < n_tiles; ++k) {
      const std::string id = "t" + std::to_string(k);
      origins[id] = {rng.uniform_int(0, 2) * 44, rng.uniform_int(0, 2) * 44};
      TileDetections td{id, {}};
      const auto n = rng.uniform_int(0, 15);
      for (std::int64_t i = 0; i < n; ++i)
        td.detections.push_back(det(rng.uniform(0, 100), rng.uniform(0, 100), 10, 10,
                                    std::round(rng.uniform() * 10) / 10));
      total += td.detections.size();
      tiles.push_back(std::move(td));
    }
    const auto out = to_global(tiles, origins, 4.0);
    ASSERT_LE(out.size(), total);
    ASSERT_EQ(out, to_global_oracle(tiles, origins, 4.0));
  }
}

// ---------------------------------------------------------------- file format

TEST(Predictions, RoundTripAndIdKinds) {
  const std::string text = R"([
    {"image_id": "roi_a", "detections": [{"cx": 10.5, "cy": 20.25, "w": 9, "h": 11, "confidence": 0.75}]},
    {"image_id": 7, "detections": []}
  ])";
  const auto recs = parse_predictions(text);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].image_id, "roi_a");
  EXPECT_FALSE(recs[0].numeric_id);
  EXPECT_EQ(recs[1].image_id, "7");
  EXPECT_TRUE(recs[1].numeric_id);
  EXPECT_EQ(recs[0].detections[0], det(10.5, 20.25, 9, 11, 0.75));
  const auto again = parse_predictions(emit_predictions(recs));
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[0].detections, recs[0].detections);
  EXPECT_TRUE(again[1].numeric_id);
}

TEST(Predictions, SchemaErrors) {
  EXPECT_THROW(parse_predictions("{}"), SchemaError);
  EXPECT_THROW(parse_predictions("[{\"detections\": []}]"), SchemaError);
  EXPECT_THROW(parse_predictions(R"([{"image_id": "a", "detections": [{"cx": 1, "cy": 1, "w": 1,
    "h": 1, "confidence": 1.5}]}])"), SchemaError);
  EXPECT_THROW(parse_predictions(R"([{"image_id": "a", "detections": [{"cx": 1, "cy": 1, "w": 1,
    "confidence": 0.5}]}])"), SchemaError);
  EXPECT_THROW(parse_predictions("[{"), ParseError);
}

}  // namespace
}  // namespace tilc
