// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tilc/error.hpp"
#include "tilc/patch_router.hpp"
#include "tilc/postprocess.hpp"
#include "tilc/synth.hpp"
#include "tilc/tiler.hpp"

namespace tilc {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Logging

namespace {

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

LogSink& log_sink() {
  static LogSink sink = [](std::string_view line) { std::cerr << line << '\n'; };
  return sink;
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(log_mutex());
  log_sink() = std::move(sink);
}

void log_line(std::string_view message) {
  std::lock_guard lock(log_mutex());
  if (log_sink()) log_sink()(message);
}

// ---------------------------------------------------------------------------
// Config

const std::map<std::string, std::string>& Config::defaults() {
  static const std::map<std::string, std::string> d = {
      // curation
      {"seed", "0"},
      {"variant", "optimized"},
      {"target", "256"},
      {"lambda", "3"},
      {"max_cells", "8"},
      {"max_attempts", "50"},
      {"feather", "4"},
      {"crop_cell", "32"},
      {"donor_candidates", "16"},
      {"blur_max", "1.0"},
      {"shift_max", "8"},
      {"max_iou", "0.1"},
      {"jobs", "1"},
      {"all_categories", "false"},
      {"map_category", ""},
      {"mpp", "0.5"},
      {"bin", "32"},
      // postprocess
      {"min_size", "8"},
      {"max_size", "20"},
      {"border_eps", "0.5"},
      {"dedup_radius", "4"},
      {"patch_size", "256"},
      // evaluation
      {"radius", "8"},
      {"ops", "10,20,50,100,200,300"},
      {"conf", "0.5"},
      // synthetic corpus
      {"synth_count", "200"},
      {"synth_small_min", "64"},
      {"synth_small_max", "128"},
      {"synth_large_min", "300"},
      {"synth_large_max", "500"},
      {"synth_large_fraction", "0.1"},
      {"synth_cell_density", "3"},
      {"synth_predictions", "true"},
      {"synth_tp_rate", "0.9"},
      {"synth_fp_per_mm2", "20"},
      {"synth_jitter", "2"},
  };
  return d;
}

Config::Config() : values_(defaults()) {}

void Config::set(std::string_view key, std::string_view value) {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second = std::string(value);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void Config::load_text(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    try {
      set(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void Config::load_file(const fs::path& path) { load_text(read_text_file(path), path.string()); }

const std::string& Config::get(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

double Config::get_double(std::string_view key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d))
    throw ConfigError("config '" + std::string(key) + "' is not a number: '" + v + "'");
  return d;
}

std::int64_t Config::get_int(std::string_view key) const {
  const std::string& v = get(key);
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config '" + std::string(key) + "' is not an integer: '" + v + "'");
  return out;
}

std::uint64_t Config::get_u64(std::string_view key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config '" + std::string(key) + "' is not an unsigned integer: '" + v + "'");
  return out;
}

bool Config::get_bool(std::string_view key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config '" + std::string(key) + "' is not a boolean: '" + v + "'");
}

std::vector<double> Config::get_doubles(std::string_view key) const {
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    char* end = nullptr;
    const double d = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(d))
      throw ConfigError("config '" + std::string(key) + "' has a non-numeric entry '" + t + "'");
    out.push_back(d);
  }
  return out;
}

namespace {

std::uint32_t get_dim(const Config& c, std::string_view key, std::int64_t min_value = 1) {
  const std::int64_t v = c.get_int(key);
  if (v < min_value || v > 1 << 20)
    throw ConfigError("config '" + std::string(key) + "' out of range: " + std::to_string(v));
  return static_cast<std::uint32_t>(v);
}

}  // namespace

StretchConfig Config::stretch_config() const {
  StretchConfig s;
  s.lambda = get_double("lambda");
  s.max_cells = get_dim(*this, "max_cells", 0);
  s.max_attempts = get_dim(*this, "max_attempts");
  s.feather_px = get_dim(*this, "feather", 0);
  s.crop_cell = get_dim(*this, "crop_cell");
  s.donor_candidates = get_dim(*this, "donor_candidates");
  s.blur_max = get_double("blur_max");
  s.shift_max = static_cast<int>(get_int("shift_max"));
  s.max_iou = get_double("max_iou");
  s.validate();
  return s;
}

FrocConfig Config::froc_config() const {
  FrocConfig f;
  f.hit_radius = get_double("radius");
  f.mpp = get_double("mpp");
  f.operating_points = get_doubles("ops");
  f.validate();
  return f;
}

CocoParseOptions Config::coco_options() const {
  CocoParseOptions o;
  o.all_categories = get_bool("all_categories");
  std::istringstream in(get("map_category"));
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    const auto eq = t.rfind('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("map_category entries must be NAME=ID, got '" + t + "'");
    int id = 0;
    const std::string num = t.substr(eq + 1);
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), id);
    if (num.empty() || ec != std::errc() || p != num.data() + num.size() || id < 0)
      throw ConfigError("map_category id must be a non-negative integer in '" + t + "'");
    o.category_map[t.substr(0, eq)] = id;
  }
  return o;
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

/// Runs fn(i) for i in [0, n) on `jobs` threads. If several items fail, the
/// lowest-index exception is rethrown so error reporting does not depend on
/// scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      if (failed.load()) break;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

unsigned get_jobs(const Config& c) {
  const std::int64_t jobs = c.get_int("jobs");
  if (jobs < 1 || jobs > 1024) throw ConfigError("jobs must be in [1, 1024]");
  return static_cast<unsigned>(jobs);
}

void log_config(std::string_view command, const Config& c, std::initializer_list<const char*> keys) {
  std::string line = std::string(command) + ": seed=" + c.get("seed");
  for (const char* k : keys) line += std::string(" ") + k + "=" + c.get(k);
  log_line(line);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

/// Source ids are file stems when those are unique, "img<id>" otherwise.
std::vector<std::string> source_ids(const CocoDataset& coco) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  bool unique = true;
  for (const auto& img : coco.images) {
    std::string stem = fs::path(img.file_name).stem().string();
    if (stem.empty() || !seen.insert(stem).second) unique = false;
    ids.push_back(std::move(stem));
  }
  if (!unique)
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = "img" + std::to_string(coco.images[i].id);
  return ids;
}

}  // namespace

// ---------------------------------------------------------------------------
// stats

std::string run_stats(const Config& config, const fs::path& coco_path) {
  log_config("stats", config, {"bin", "target"});
  const CocoDataset coco = read_coco(coco_path, config.coco_options());
  const std::uint32_t target = get_dim(config, "target");
  std::vector<std::uint32_t> sizes;
  std::size_t routed[3] = {0, 0, 0};
  for (const auto& img : coco.images) {
    sizes.push_back(max_dim(img.width, img.height));
    ++routed[static_cast<int>(route(img.width, img.height, target).route)];
  }
  log_line("stats: " + std::to_string(coco.images.size()) + " patches; passthrough=" +
           std::to_string(routed[0]) + " tile=" + std::to_string(routed[1]) +
           " stretch=" + std::to_string(routed[2]));
  return histogram_csv(histogram(sizes, get_dim(config, "bin")));
}

// ---------------------------------------------------------------------------
// curate

CurateSummary run_curate(const Config& config, const fs::path& coco_path,
                         const fs::path& image_dir, const fs::path& out_dir) {
  const std::string variant = config.get("variant");
  if (variant != "padded" && variant != "optimized")
    throw ConfigError("variant must be 'padded' or 'optimized', got '" + variant + "'");
  const bool optimized = variant == "optimized";
  const std::uint32_t target = get_dim(config, "target");
  const std::uint64_t seed = config.get_u64("seed");
  const double mpp = config.get_double("mpp");
  if (!(mpp > 0)) throw ConfigError("mpp must be > 0");
  const unsigned jobs = get_jobs(config);
  const StretchConfig stretch = config.stretch_config();
  log_config("curate", config, {"variant", "target", "lambda", "max_cells", "jobs"});

  const CocoDataset coco = read_coco(coco_path, config.coco_options());
  const std::vector<std::string> ids = source_ids(coco);
  std::vector<std::size_t> order(coco.images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ids[a] < ids[b]; });

  // Load every source raster (also the donor pool).
  std::vector<std::optional<AnnotatedPatch>> loaded(order.size());
  std::vector<std::size_t> invalid(order.size(), 0);
  parallel_for(order.size(), jobs, [&](std::size_t k) {
    const CocoImage& img = coco.images[order[k]];
    if (img.file_name.empty())
      throw SchemaError("image id " + std::to_string(img.id) + " has no file_name");
    PixelPatch patch = load_image(image_dir / img.file_name, mpp);
    if (patch.width() != img.width || patch.height() != img.height)
      throw SchemaError("image '" + img.file_name + "' is " + std::to_string(patch.width()) + "x" +
                        std::to_string(patch.height()) + " but the annotation file says " +
                        std::to_string(img.width) + "x" + std::to_string(img.height));
    std::vector<BBox> boxes;
    for (const auto& b : img.boxes) {
      if (contained_in(b, img.width, img.height))
        boxes.push_back(b);
      else
        ++invalid[k];
    }
    loaded[k].emplace(AnnotatedPatch{std::move(patch), std::move(boxes), ids[order[k]], {}});
  });
  std::vector<AnnotatedPatch> sources;
  sources.reserve(loaded.size());
  for (auto& p : loaded) sources.push_back(std::move(*p));
  loaded.clear();

  CurateSummary summary;
  summary.sources = sources.size();
  for (std::size_t k = 0; k < sources.size(); ++k) {
    if (invalid[k] == 0) continue;
    summary.invalid_boxes += invalid[k];
    log_line("warning: '" + sources[k].source_id + "': skipped " + std::to_string(invalid[k]) +
             " box(es) extending outside the image");
  }

  ensure_dir(out_dir / "images");
  ensure_dir(out_dir / "labels");
  const DonorPool pool = optimized ? DonorPool(sources) : DonorPool();

  struct Output {
    std::vector<ManifestRecord> records;
    Route route = Route::PassThrough;
    std::size_t fallback_cells = 0;
  };
  std::vector<Output> outputs(sources.size());

  parallel_for(sources.size(), jobs, [&](std::size_t k) {
    const AnnotatedPatch& src = sources[k];
    Output& out = outputs[k];
    auto emit = [&](const AnnotatedPatch& p, const std::string& stem, std::size_t dropped) {
      const std::string image_rel = "images/" + stem + ".png";
      const std::string label_rel = "labels/" + stem + ".txt";
      save_image(p.patch, out_dir / image_rel);
      write_text_file(out_dir / label_rel, emit_yolo(p));
      out.records.push_back({image_rel, label_rel, src.source_id, p.origin, variant,
                             static_cast<std::int64_t>(dropped)});
    };

    out.route = route(src.patch.width(), src.patch.height(), target).route;
    switch (out.route) {
      case Route::PassThrough:
        emit(src, src.source_id, 0);
        break;
      case Route::Tile:
        for (const auto& t : tile(src, target, optimized ? PadMode::Mirror : PadMode::Gray))
          emit(t.patch,
               tile_stem(src.source_id, static_cast<std::uint32_t>(t.patch.origin.x),
                         static_cast<std::uint32_t>(t.patch.origin.y)),
               t.dropped);
        break;
      case Route::Stretch:
        if (optimized) {
          StretchResult r = stretch_compose(src, pool, RngStream(seed, src.source_id), target, stretch);
          out.fallback_cells = r.fallback_cells;
          emit(r.patch, src.source_id, 0);
        } else {
          emit(gray_pad(src, target), src.source_id, 0);
        }
        break;
    }
  });

  DatasetManifest manifest;
  manifest.global_seed = seed;
  manifest.config = config.values();
  manifest.config.erase("jobs");
  for (auto& o : outputs) {
    switch (o.route) {
      case Route::PassThrough: ++summary.passthrough; break;
      case Route::Tile: ++summary.tiled; break;
      case Route::Stretch: ++summary.stretched; break;
    }
    summary.fallback_cells += o.fallback_cells;
    for (auto& r : o.records) {
      summary.dropped_boxes += static_cast<std::uint64_t>(r.dropped_box_count);
      manifest.records.push_back(std::move(r));
    }
  }
  summary.records = manifest.records.size();
  write_manifest(manifest, out_dir / "manifest.json");
  log_line("curate: " + std::to_string(summary.sources) + " sources -> " +
           std::to_string(summary.records) + " patches (passthrough=" +
           std::to_string(summary.passthrough) + " tile=" + std::to_string(summary.tiled) +
           " stretch=" + std::to_string(summary.stretched) + ", dropped boxes=" +
           std::to_string(summary.dropped_boxes) + ")");
  return summary;
}

// ---------------------------------------------------------------------------
// postprocess

PostprocessSummary run_postprocess(const Config& config, const fs::path& predictions_in,
                                   const fs::path& predictions_out,
                                   const std::optional<fs::path>& manifest_path) {
  log_config("postprocess", config,
             {"min_size", "max_size", "border_eps", "dedup_radius", "patch_size"});
  const SizeBand band{config.get_double("min_size"), config.get_double("max_size")};
  if (!(band.min_px >= 0 && band.min_px <= band.max_px))
    throw ConfigError("size band must satisfy 0 <= min_size <= max_size");
  const double eps = config.get_double("border_eps");
  const double patch = get_dim(config, "patch_size");
  const double dedup = config.get_double("dedup_radius");

  std::vector<PredictionRecord> records = parse_predictions(read_text_file(predictions_in));
  PostprocessSummary summary;
  for (auto& r : records) {
    summary.input += r.detections.size();
    r.detections = size_filter(adjust_partial_centers(r.detections, patch, patch, eps), band);
    summary.after_filter += r.detections.size();
  }

  std::vector<PredictionRecord> out;
  if (!manifest_path) {
    out = std::move(records);
  } else {
    LoadedManifest loaded = read_manifest(*manifest_path);
    for (const auto& w : loaded.warnings) log_line("warning: " + w);
    std::map<std::string, const ManifestRecord*> by_key;
    for (const auto& rec : loaded.manifest.records) {
      const fs::path p(rec.image_path);
      by_key.emplace(rec.image_path, &rec);
      by_key.emplace(p.filename().string(), &rec);
      by_key.emplace(p.stem().string(), &rec);
    }
    std::map<std::string, Origin> origins;
    std::map<std::string, std::vector<TileDetections>> by_source;
    for (auto& r : records) {
      auto it = by_key.find(r.image_id);
      if (it == by_key.end())
        throw ReferenceError("prediction image_id '" + r.image_id + "' is not in the manifest");
      origins[r.image_id] = it->second->origin;
      by_source[it->second->source_id].push_back({r.image_id, std::move(r.detections)});
    }
    for (auto& [source, tiles] : by_source)
      out.push_back({source, false, to_global(tiles, origins, dedup)});
  }
  for (const auto& r : out) summary.output += r.detections.size();
  write_text_file(predictions_out, emit_predictions(out));
  log_line("postprocess: " + std::to_string(summary.input) + " detections -> " +
           std::to_string(summary.after_filter) + " after size band -> " +
           std::to_string(summary.output) + " written");
  return summary;
}

// ---------------------------------------------------------------------------
// eval

EvalReport run_eval(const Config& config, const fs::path& gt_coco, const fs::path& predictions) {
  log_config("eval", config, {"radius", "mpp", "ops", "conf"});
  const FrocConfig froc = config.froc_config();
  const double conf = config.get_double("conf");
  const CocoDataset coco = read_coco(gt_coco, config.coco_options());
  const auto preds = parse_predictions(read_text_file(predictions));

  std::vector<FrocImage> images(coco.images.size());
  std::map<std::string, std::size_t> by_id, by_name, by_stem;
  for (std::size_t i = 0; i < coco.images.size(); ++i) {
    const CocoImage& img = coco.images[i];
    by_id.emplace(std::to_string(img.id), i);
    if (!img.file_name.empty()) {
      by_name.emplace(img.file_name, i);
      by_stem.emplace(fs::path(img.file_name).stem().string(), i);
    }
    images[i].area_mm2 = area_mm2(img.width, img.height, froc.mpp);
    for (const auto& b : img.boxes) images[i].gt.push_back({b.cx(), b.cy()});
  }
  for (const auto& rec : preds) {
    // Integer ids match COCO ids; strings match file_name, then its stem.
    std::optional<std::size_t> idx;
    auto lookup = [&](const std::map<std::string, std::size_t>& m) {
      if (auto it = m.find(rec.image_id); it != m.end() && !idx) idx = it->second;
    };
    if (rec.numeric_id) {
      lookup(by_id);
    } else {
      lookup(by_name);
      lookup(by_stem);
      lookup(by_id);
    }
    if (!idx)
      throw ReferenceError("prediction image_id '" + rec.image_id + "' matches no ground-truth image");
    for (const auto& d : rec.detections) images[*idx].dets.push_back({d.cx, d.cy, d.confidence});
  }

  EvalReport report;
  report.curve = froc_curve(images, froc.hit_radius);
  report.score = froc_score(report.curve, froc.operating_points);
  report.pr = precision_recall(images, froc.hit_radius, conf);
  report.conf_threshold = conf;
  return report;
}

// ---------------------------------------------------------------------------
// synth

SynthSummary run_synth(const Config& config, const fs::path& out_dir) {
  log_config("synth", config,
             {"synth_count", "synth_large_fraction", "synth_tp_rate", "synth_fp_per_mm2",
              "synth_jitter", "mpp"});
  const std::uint64_t seed = config.get_u64("seed");
  const std::uint32_t count = get_dim(config, "synth_count", 0);
  const std::uint32_t small_min = get_dim(config, "synth_small_min");
  const std::uint32_t small_max = get_dim(config, "synth_small_max");
  const std::uint32_t large_min = get_dim(config, "synth_large_min");
  const std::uint32_t large_max = get_dim(config, "synth_large_max");
  if (small_min > small_max || large_min > large_max)
    throw ConfigError("synth size ranges must satisfy min <= max");
  const double large_fraction = config.get_double("synth_large_fraction");
  if (!(large_fraction >= 0 && large_fraction <= 1))
    throw ConfigError("synth_large_fraction must be in [0, 1]");
  const double density = config.get_double("synth_cell_density");
  if (!(density >= 0)) throw ConfigError("synth_cell_density must be >= 0");
  const double mpp = config.get_double("mpp");
  if (!(mpp > 0)) throw ConfigError("mpp must be > 0");
  const bool with_predictions = config.get_bool("synth_predictions");
  const DetectionSynthParams det_params{config.get_double("synth_tp_rate"),
                                        config.get_double("synth_fp_per_mm2"),
                                        config.get_double("synth_jitter")};
  const unsigned jobs = get_jobs(config);

  ensure_dir(out_dir / "images");
  CocoDataset coco;
  coco.categories.push_back({1, "lymphocyte", 0});
  coco.images.resize(count);
  std::vector<PredictionRecord> preds(count);

  parallel_for(count, jobs, [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "synth_%05zu", i + 1);
    RngStream rng(seed, std::string("synth/") + name);
    const bool large = rng.bernoulli(large_fraction);
    const auto longest = static_cast<std::uint32_t>(
        large ? rng.uniform_int(large_min, large_max) : rng.uniform_int(small_min, small_max));
    const auto shortest = static_cast<std::uint32_t>(
        rng.uniform_int(std::max<std::int64_t>(1, std::lround(0.6 * longest)), longest));
    const bool landscape = rng.bernoulli(0.5);
    const std::uint32_t w = landscape ? longest : shortest;
    const std::uint32_t h = landscape ? shortest : longest;
    const auto n_cells = static_cast<std::uint32_t>(std::lround(double(w) * h / 1e4 * density));

    RngStream patch_rng = rng.fork("patch");
    AnnotatedPatch p = gen_patch(patch_rng, w, h, std::min(w, h) >= 9 ? n_cells : 0, {}, mpp);
    save_image(p.patch, out_dir / "images" / (std::string(name) + ".png"));
    coco.images[i] = CocoImage{static_cast<std::int64_t>(i + 1), std::string(name) + ".png", w, h,
                               p.boxes};
    if (with_predictions) {
      RngStream det_rng = rng.fork("detections");
      preds[i] = PredictionRecord{std::to_string(i + 1), true,
                                  gen_detections(p.boxes, det_params, area_mm2(w, h, mpp), w, h,
                                                 det_rng)};
    }
  });

  SynthSummary summary;
  summary.images = count;
  for (const auto& img : coco.images) summary.boxes += img.boxes.size();
  write_text_file(out_dir / "coco.json", emit_coco(coco));
  if (with_predictions) {
    for (const auto& p : preds) summary.detections += p.detections.size();
    write_text_file(out_dir / "predictions.json", emit_predictions(preds));
  }
  log_line("synth: " + std::to_string(summary.images) + " images, " +
           std::to_string(summary.boxes) + " boxes, " + std::to_string(summary.detections) +
           " detections");
  return summary;
}

}  // namespace tilc
