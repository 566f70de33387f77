// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on any
// failure. Usage: acceptance --cli PATH --work DIR

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/froc_oracle.hpp"
#include "tilc/annotation_io.hpp"
#include "tilc/froc.hpp"
#include "tilc/pipeline.hpp"
#include "tilc/postprocess.hpp"
#include "tilc/rng.hpp"
#include "tilc/stretcher.hpp"
#include "tilc/synth.hpp"
#include "tilc/tiler.hpp"

namespace fs = std::filesystem;
using namespace tilc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome froc_oracle_equivalence() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::vector<double> ops{10, 20, 50, 100, 200, 300};
  for (std::uint64_t inst = 0; inst < 200 && o.pass; ++inst) {
    RngStream rng(2026, "acceptance/froc", inst);
    const auto n_images = static_cast<std::size_t>(rng.uniform_int(1, 10));
    std::vector<FrocImage> images(n_images);
    std::size_t total_gt = 0;
    for (auto& img : images) {
      const double side = static_cast<double>(rng.uniform_int(20, 120));
      img.area_mm2 = area_mm2(side, side, 0.5) * (0.5 + rng.uniform());
      const auto n_gt = static_cast<std::size_t>(rng.uniform_int(0, 20));
      const auto n_det = static_cast<std::size_t>(rng.uniform_int(0, 20));
      for (std::size_t g = 0; g < n_gt; ++g)
        img.gt.push_back({rng.uniform() * side, rng.uniform() * side});
      for (std::size_t d = 0; d < n_det; ++d) {
        // Coarse confidences force threshold ties; half the detections sit
        // near a GT so matches and contention both occur.
        const double conf = static_cast<double>(rng.uniform_int(1, 10)) / 10.0;
        if (n_gt > 0 && rng.bernoulli(0.5)) {
          const auto& g = img.gt[static_cast<std::size_t>(rng.uniform_int(0, n_gt - 1))];
          img.dets.push_back({g.x + (rng.uniform() - 0.5) * 20, g.y + (rng.uniform() - 0.5) * 20, conf});
        } else {
          img.dets.push_back({rng.uniform() * side, rng.uniform() * side, conf});
        }
      }
      total_gt += n_gt;
    }
    if (total_gt == 0) images[0].gt.push_back({1, 1});
    const double radius = 8.0;

    const FrocCurve curve = froc_curve(images, radius);
    const auto expect = oracle::froc_curve(images, radius);
    if (curve.points.size() != expect.size()) {
      o.fail("instance " + std::to_string(inst) + ": point count differs");
      break;
    }
    for (std::size_t i = 0; i < expect.size(); ++i) {
      const auto& a = curve.points[i];
      const auto& b = expect[i];
      if (std::abs(a.threshold - b.threshold) > 1e-12 ||
          std::abs(a.fp_per_mm2 - b.fp_per_mm2) > 1e-12 ||
          std::abs(a.sensitivity - b.sensitivity) > 1e-12) {
        o.fail("instance " + std::to_string(inst) + ": point " + std::to_string(i) + " differs");
        break;
      }
    }
    const double s = froc_score(curve, ops);
    const double e = oracle::froc_score(expect, ops);
    if (std::abs(s - e) > 1e-12)
      o.fail("instance " + std::to_string(inst) + ": score " + fmt("%.15g", s) + " vs " +
             fmt("%.15g", e));
  }
  const double dt = seconds_since(t0);
  if (!(dt < 10.0)) o.fail("runtime " + fmt("%.2f", dt) + " s");
  if (o.pass) o.detail = "200 instances, " + fmt("%.3f", dt) + " s";
  return o;
}

// ---------------------------------------------------------------------------

Outcome tiling_conservation() {
  Outcome o;
  std::size_t boxes_checked = 0, tiles_checked = 0;
  for (std::uint64_t i = 0; i < 100 && o.pass; ++i) {
    RngStream rng(2026, "acceptance/tiling", i);
    const auto w = static_cast<std::uint32_t>(rng.uniform_int(256, 1024));
    const auto h = static_cast<std::uint32_t>(rng.uniform_int(256, 1024));
    RngStream patch_rng = rng.fork("patch");
    const auto n_cells = static_cast<std::uint32_t>(std::lround(double(w) * h / 1e4 * 3));
    AnnotatedPatch src = gen_patch(patch_rng, w, h, n_cells);
    src.source_id = "src" + std::to_string(i);

    const auto windows = plan_windows(w, h, 256);
    const auto tiles = tile(src, 256);
    if (tiles.size() != windows.size()) {
      o.fail("patch " + std::to_string(i) + ": tile count differs from plan");
      break;
    }
    std::vector<std::size_t> seen(src.boxes.size(), 0);
    for (const auto& t : tiles) {
      ++tiles_checked;
      if (t.patch.patch.width() != 256 || t.patch.patch.height() != 256)
        o.fail("patch " + std::to_string(i) + ": tile is not 256x256");
      for (const auto& b : t.patch.boxes) {
        BBox back = b;
        back.x_min += static_cast<double>(t.patch.origin.x);
        back.y_min += static_cast<double>(t.patch.origin.y);
        auto it = std::find(src.boxes.begin(), src.boxes.end(), back);
        if (it == src.boxes.end()) {
          o.fail("patch " + std::to_string(i) + ": tile box does not map back exactly");
          continue;
        }
        ++seen[static_cast<std::size_t>(it - src.boxes.begin())];
      }
    }
    for (std::size_t b = 0; b < src.boxes.size(); ++b) {
      const BBox& box = src.boxes[b];
      std::size_t containing = 0;
      for (const auto& win : windows)
        if (box.x_min >= win.x0 && box.y_min >= win.y0 && box.x_max() <= win.x0 + win.size &&
            box.y_max() <= win.y0 + win.size)
          ++containing;
      if (containing != seen[b])
        o.fail("patch " + std::to_string(i) + ": box " + std::to_string(b) + " appears " +
               std::to_string(seen[b]) + " times, contained in " + std::to_string(containing));
      ++boxes_checked;
    }
  }
  if (o.pass)
    o.detail = "100 patches, " + std::to_string(tiles_checked) + " tiles, " +
               std::to_string(boxes_checked) + " boxes";
  return o;
}

// ---------------------------------------------------------------------------

bool inside(const PixelRect& r, std::uint32_t x, std::uint32_t y) {
  return x >= r.x && x < r.x + r.w && y >= r.y && y < r.y + r.h;
}

Outcome stretch_invariants() {
  Outcome o;
  std::vector<AnnotatedPatch> donors;
  for (std::uint64_t d = 0; d < 12; ++d) {
    RngStream rng(2026, "acceptance/donor", d);
    const auto side = static_cast<std::uint32_t>(rng.uniform_int(64, 200));
    AnnotatedPatch p = gen_patch(rng, side, side, side * side * 3 / 10000 + 2);
    p.source_id = "donor" + std::to_string(d);
    donors.push_back(std::move(p));
  }
  const DonorPool pool(donors);
  std::size_t transplants = 0;
  for (std::uint64_t i = 0; i < 100 && o.pass; ++i) {
    RngStream rng(2026, "acceptance/stretch", i);
    const auto w = static_cast<std::uint32_t>(rng.uniform_int(32, 255));
    const auto h = static_cast<std::uint32_t>(rng.uniform_int(32, 255));
    RngStream patch_rng = rng.fork("patch");
    AnnotatedPatch src = gen_patch(patch_rng, w, h, std::max<std::uint32_t>(1, w * h * 3 / 10000));
    src.source_id = "small" + std::to_string(i);
    const std::string tag = "patch " + std::to_string(i) + " (" + std::to_string(w) + "x" +
                            std::to_string(h) + ")";

    const StretchResult r = stretch_compose(src, pool, rng.fork("stretch"), 256);
    const PixelPatch& out = r.patch.patch;
    if (out.width() != 256 || out.height() != 256) {
      o.fail(tag + ": output is not 256x256");
      break;
    }

    std::vector<PixelRect> rects;
    for (const auto& t : r.transplants) {
      ++transplants;
      const PixelRect dst = pixel_rect(t.placed);
      const PixelRect from = pixel_rect(t.donor_box);
      const PixelPatch& donor = pool.entry(t.donor).patch;
      if (dst.w != from.w || dst.h != from.h) o.fail(tag + ": transplant rect size differs");
      for (std::uint32_t y = 0; y < from.h && o.pass; ++y)
        for (std::uint32_t x = 0; x < from.w; ++x)
          if (!(out.at(dst.x + x, dst.y + y) == donor.at(from.x + x, from.y + y))) {
            o.fail(tag + ": transplanted pixels differ from donor");
            break;
          }
      rects.push_back(dst);
    }
    for (std::size_t a = 0; a < r.transplants.size(); ++a)
      for (std::size_t b = a + 1; b < r.transplants.size(); ++b)
        if (iou(r.transplants[a].placed, r.transplants[b].placed) > 0.1)
          o.fail(tag + ": transplanted boxes overlap with IoU > 0.1");
    for (const auto& t : r.transplants)
      for (const auto& b : r.patch.boxes)
        if (!(b == t.placed) && iou(b, t.placed) > 0.1)
          o.fail(tag + ": transplanted box overlaps a canvas box with IoU > 0.1");

    // Mirror region: equal to the reflect-tiling and, panel by panel, to the
    // source under the reflection x -> 2w-1-x, y -> 2h-1-y.
    const PixelPatch mirrored = mirror_pixels(src.patch, r.mirror_w, r.mirror_h);
    auto untouched = [&](std::uint32_t x, std::uint32_t y) {
      for (const auto& rc : rects)
        if (inside(rc, x, y)) return false;
      return true;
    };
    for (std::uint32_t y = 0; y < r.mirror_h && o.pass; ++y)
      for (std::uint32_t x = 0; x < r.mirror_w; ++x) {
        if (!untouched(x, y)) continue;
        const std::uint32_t sx = x < w ? x : 2 * w - 1 - x;
        const std::uint32_t sy = y < h ? y : 2 * h - 1 - y;
        if (!(out.at(x, y) == mirrored.at(x, y)) || !(out.at(x, y) == src.patch.at(sx, sy))) {
          o.fail(tag + ": mirror panel does not reflect back to the source");
          break;
        }
      }
    if (r.mirror_w != std::min<std::uint32_t>(2 * w, 256) ||
        r.mirror_h != std::min<std::uint32_t>(2 * h, 256))
      o.fail(tag + ": unexpected mirror extent");
  }
  if (o.pass) o.detail = "100 patches, " + std::to_string(transplants) + " transplants";
  return o;
}

// ---------------------------------------------------------------------------

Outcome postprocess_filter() {
  Outcome o;
  std::size_t total = 0;
  const double extents[] = {7.999999, 8.0, 8.000001, 14.0, 19.999999, 20.0, 20.000001};
  for (std::uint64_t trial = 0; trial < 500 && o.pass; ++trial) {
    RngStream rng(2026, "acceptance/postprocess", trial);
    std::vector<Detection> dets;
    const auto n = rng.uniform_int(0, 40);
    for (std::int64_t k = 0; k < n; ++k) {
      Detection d;
      d.width = rng.bernoulli(0.3) ? extents[rng.uniform_int(0, 6)] : rng.uniform() * 30;
      d.height = rng.bernoulli(0.3) ? extents[rng.uniform_int(0, 6)] : rng.uniform() * 30;
      // A third of the detections touch a border so truncation is exercised.
      const double edge = rng.uniform();
      d.cx = edge < 0.15 ? d.width / 2 : edge < 0.3 ? 256 - d.width / 2 : rng.uniform() * 256;
      d.cy = rng.bernoulli(0.2) ? d.height / 2 : rng.uniform() * 256;
      d.confidence = rng.uniform();
      dets.push_back(d);
    }
    total += dets.size();

    std::vector<Detection> expect;
    for (const auto& d : dets)
      if (d.width >= 8 && d.width <= 20 && d.height >= 8 && d.height <= 20) expect.push_back(d);
    const auto kept = size_filter(dets);
    if (kept != expect) o.fail("trial " + std::to_string(trial) + ": kept set differs");
    if (size_filter(kept) != kept)
      o.fail("trial " + std::to_string(trial) + ": size_filter not idempotent");
    const auto adj = adjust_partial_centers(dets, 256, 256);
    if (adjust_partial_centers(adj, 256, 256) != adj)
      o.fail("trial " + std::to_string(trial) + ": adjust_partial_centers not idempotent");
  }
  if (o.pass) o.detail = "500 trials, " + std::to_string(total) + " detections";
  return o;
}

// ---------------------------------------------------------------------------

int run(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> tree;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    const std::string rel = fs::relative(e.path(), root).generic_string();
    if (e.is_directory()) {
      tree[rel + "/"] = "";
    } else {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      tree[rel] = ss.str();
    }
  }
  return tree;
}

std::string compare_trees(const fs::path& a, const fs::path& b) {
  const auto ta = snapshot(a), tb = snapshot(b);
  if (ta.size() != tb.size())
    return std::to_string(ta.size()) + " vs " + std::to_string(tb.size()) + " entries";
  for (auto ia = ta.begin(), ib = tb.begin(); ia != ta.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return "entry " + ia->first + " vs " + ib->first;
    if (ia->second != ib->second) return "content of " + ia->first + " differs";
  }
  return {};
}

Outcome end_to_end_determinism(const std::string& cli, const fs::path& work) {
  Outcome o;
  const fs::path dir = work / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path corpus = dir / "corpus";
  if (run(cli + " -q synth --out " + quote(corpus) + " --count 80 --seed 5 --large-fraction 0.2") != 0) {
    o.fail("synth failed");
    return o;
  }
  const std::string curate = " curate --coco " + quote(corpus / "coco.json") + " --images " +
                             quote(corpus / "images") + " --seed 17";
  std::size_t files = 0;
  for (const char* variant : {"optimized", "padded"}) {
    const std::string args = curate + " --variant " + variant;
    const fs::path a = dir / (std::string(variant) + "_a");
    const fs::path b = dir / (std::string(variant) + "_b");
    const fs::path j1 = dir / (std::string(variant) + "_j1");
    const fs::path j8 = dir / (std::string(variant) + "_j8");
    if (run(cli + " -q" + args + " --out " + quote(a)) != 0 ||
        run(cli + " -q" + args + " --out " + quote(b)) != 0 ||
        run(cli + " -q --jobs 1" + args + " --out " + quote(j1)) != 0 ||
        run(cli + " -q --jobs 8" + args + " --out " + quote(j8)) != 0) {
      o.fail(std::string(variant) + ": curate failed");
      return o;
    }
    if (auto d = compare_trees(a, b); !d.empty()) o.fail(std::string(variant) + " repeat: " + d);
    if (auto d = compare_trees(j1, j8); !d.empty()) o.fail(std::string(variant) + " jobs 1 vs 8: " + d);
    if (auto d = compare_trees(a, j1); !d.empty()) o.fail(std::string(variant) + " default vs jobs 1: " + d);
    files += snapshot(a).size();
  }
  if (o.pass) o.detail = "2 variants x 4 runs, " + std::to_string(files) + " entries compared";
  return o;
}

// ---------------------------------------------------------------------------

Outcome closed_loop() {
  Outcome o;
  const std::vector<double> ops{10, 20, 50, 100, 200, 300};
  std::vector<FrocImage> perfect, blind;
  std::size_t gt_total = 0;
  for (std::uint64_t i = 0; i < 40; ++i) {
    RngStream rng(2026, "acceptance/closed_loop", i);
    const auto side = static_cast<std::uint32_t>(rng.uniform_int(128, 320));
    RngStream patch_rng = rng.fork("patch");
    const AnnotatedPatch p = gen_patch(patch_rng, side, side, side * side * 3 / 10000 + 1);
    const double area = area_mm2(side, side, 0.5);
    FrocImage a, b;
    a.area_mm2 = b.area_mm2 = area;
    for (const auto& box : p.boxes) a.gt.push_back({box.cx(), box.cy()});
    b.gt = a.gt;
    gt_total += a.gt.size();
    RngStream r1 = rng.fork("tp1"), r0 = rng.fork("tp0");
    for (const auto& d : gen_detections(p.boxes, {1.0, 0.0, 3.0}, area, side, side, r1))
      a.dets.push_back({d.cx, d.cy, d.confidence});
    for (const auto& d : gen_detections(p.boxes, {0.0, 0.0, 3.0}, area, side, side, r0))
      b.dets.push_back({d.cx, d.cy, d.confidence});
    perfect.push_back(std::move(a));
    blind.push_back(std::move(b));
  }
  const double s1 = froc_score(froc_curve(perfect, 8.0), ops);
  const double s0 = froc_score(froc_curve(blind, 8.0), ops);
  if (s1 != 1.0) o.fail("tp_rate=1 score " + fmt("%.17g", s1));
  if (s0 != 0.0) o.fail("tp_rate=0 score " + fmt("%.17g", s0));
  if (o.pass)
    o.detail = "40 images, " + std::to_string(gt_total) + " cells, scores " + fmt("%.1f", s1) +
               " / " + fmt("%.1f", s0);
  return o;
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) { return read_text_file(p); }

Outcome format_goldens(const fs::path& fixtures) {
  Outcome o;
  struct Golden {
    const char* file;
    std::uint32_t w, h;
    std::vector<BBox> boxes;
  };
  const std::vector<Golden> goldens{
      {"yolo/square_256.txt", 256, 256, {{64, 64, 32, 32, 0}, {0, 0, 256, 256, 0}}},
      {"yolo/rect_300x200.txt", 300, 200,
       {{10, 20, 30, 40, 0}, {1.5, 2.5, 9, 11, 0}, {290, 190, 10, 10, 1}}},
      {"yolo/empty.txt", 64, 64, {}},
  };
  for (const auto& g : goldens) {
    AnnotatedPatch p{PixelPatch(g.w, g.h), g.boxes, "golden", {}};
    if (emit_yolo(p) != slurp(fixtures / g.file)) o.fail(std::string(g.file) + " differs");
  }

  std::size_t boxes = 0;
  for (const char* file : {"coco/sample.json"}) {
    const CocoDataset first = parse_coco(slurp(fixtures / file));
    const std::string emitted = emit_coco(first);
    const CocoDataset second = parse_coco(emitted);
    if (second.images.size() != first.images.size()) {
      o.fail(std::string(file) + ": image count changed");
      continue;
    }
    for (std::size_t i = 0; i < first.images.size(); ++i) {
      if (first.images[i].boxes != second.images[i].boxes)
        o.fail(std::string(file) + ": boxes of image " + std::to_string(first.images[i].id) +
               " changed");
      boxes += first.images[i].boxes.size();
    }
    if (emit_coco(second) != emitted) o.fail(std::string(file) + ": emit is not a fixed point");
  }
  // Random non-representable coordinates must survive too.
  CocoDataset random;
  random.categories.push_back({1, "lymphocyte", 0});
  RngStream rng(2026, "acceptance/coco");
  for (std::int64_t i = 1; i <= 20; ++i) {
    CocoImage img{i, "img" + std::to_string(i) + ".png", 1000, 1000, {}};
    for (int k = 0; k < 25; ++k)
      img.boxes.push_back({rng.uniform() * 900, rng.uniform() * 900, rng.uniform() * 90 + 1e-9,
                           rng.uniform() * 90 + 1e-9, 0});
    boxes += img.boxes.size();
    random.images.push_back(std::move(img));
  }
  const CocoDataset back = parse_coco(emit_coco(random));
  for (std::size_t i = 0; i < random.images.size(); ++i)
    if (back.images.at(i).boxes != random.images[i].boxes)
      o.fail("random dataset: boxes of image " + std::to_string(i + 1) + " changed");
  if (o.pass) o.detail = "3 YOLO goldens, " + std::to_string(boxes) + " COCO boxes";
  return o;
}

// ---------------------------------------------------------------------------

Outcome throughput(const std::string& cli, const fs::path& work) {
  Outcome o;
  const fs::path dir = work / "throughput";
  fs::remove_all(dir);
  const fs::path corpus = dir / "corpus";
  if (run(cli + " -q synth --no-predictions --count 2000 --seed 3 --out " + quote(corpus)) != 0) {
    o.fail("synth failed");
    return o;
  }
  const auto t0 = Clock::now();
  const int rc = run(cli + " -q --jobs 4 curate --coco " + quote(corpus / "coco.json") +
                     " --images " + quote(corpus / "images") + " --out " + quote(dir / "out"));
  const double dt = seconds_since(t0);
  if (rc != 0) o.fail("curate failed");
  if (!(dt < 120.0)) o.fail("curate took " + fmt("%.1f", dt) + " s");
  if (o.pass) o.detail = "2000 patches in " + fmt("%.1f", dt) + " s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  fs::path work = fs::temp_directory_path() / "tilc_acceptance";
  fs::path fixtures = TILC_FIXTURE_DIR;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli = argv[i + 1];
    else if (flag == "--work") work = argv[i + 1];
    else if (flag == "--fixtures") fixtures = argv[i + 1];
    else {
      std::fprintf(stderr, "usage: acceptance --cli PATH [--work DIR] [--fixtures DIR]\n");
      return 2;
    }
  }
  if (cli.empty()) {
    std::fprintf(stderr, "acceptance: --cli is required\n");
    return 2;
  }
  cli = "'" + cli + "'";
  fs::create_directories(work);
  set_log_sink({});

  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"FROC oracle equivalence", froc_oracle_equivalence},
      {"Tiling conservation", tiling_conservation},
      {"Stretch invariants", stretch_invariants},
      {"Postprocess filter", postprocess_filter},
      {"End-to-end determinism", [&] { return end_to_end_determinism(cli, work); }},
      {"Synthetic closed loop", closed_loop},
      {"Format golden tests", [&] { return format_goldens(fixtures); }},
      {"Throughput sanity", [&] { return throughput(cli, work); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    std::printf("[%s] %s: %s\n", out.pass ? "PASS" : "FAIL", c.name, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
