// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_PIPELINE_HPP
#define TILC_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tilc/annotation_io.hpp"
#include "tilc/froc.hpp"
#include "tilc/stretcher.hpp"

namespace tilc {

/// String key/value configuration with built-in defaults. Later `set` calls
/// win, so loading a file and then applying flags gives
/// flags > file > defaults.
class Config {
 public:
  Config();

  static const std::map<std::string, std::string>& defaults();

  void set(std::string_view key, std::string_view value);  // ConfigError on unknown key
  /// "key = value" lines; '#' starts a comment.
  void load_text(std::string_view text, std::string_view origin = "<text>");
  void load_file(const std::filesystem::path& path);

  const std::string& get(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  StretchConfig stretch_config() const;
  FrocConfig froc_config() const;
  CocoParseOptions coco_options() const;

 private:
  std::map<std::string, std::string> values_;
};

using LogSink = std::function<void(std::string_view)>;
/// Process-wide log destination; defaults to stderr. Pass an empty function
/// to silence logging.
void set_log_sink(LogSink sink);
void log_line(std::string_view message);

std::string run_stats(const Config& config, const std::filesystem::path& coco_path);

struct CurateSummary {
  std::uint64_t sources = 0;
  std::uint64_t records = 0;
  std::uint64_t passthrough = 0;
  std::uint64_t tiled = 0;
  std::uint64_t stretched = 0;
  std::uint64_t dropped_boxes = 0;
  std::uint64_t invalid_boxes = 0;   // source boxes outside their image
  std::uint64_t fallback_cells = 0;  // crop cells no donor could fill
};

CurateSummary run_curate(const Config& config, const std::filesystem::path& coco_path,
                         const std::filesystem::path& image_dir,
                         const std::filesystem::path& out_dir);

struct PostprocessSummary {
  std::uint64_t input = 0;
  std::uint64_t after_filter = 0;
  std::uint64_t output = 0;
};

PostprocessSummary run_postprocess(const Config& config,
                                   const std::filesystem::path& predictions_in,
                                   const std::filesystem::path& predictions_out,
                                   const std::optional<std::filesystem::path>& manifest);

struct EvalReport {
  FrocCurve curve;
  double score = 0;
  PrecisionRecall pr;
  double conf_threshold = 0;
};

EvalReport run_eval(const Config& config, const std::filesystem::path& gt_coco,
                    const std::filesystem::path& predictions);

struct SynthSummary {
  std::uint64_t images = 0;
  std::uint64_t boxes = 0;
  std::uint64_t detections = 0;
};

SynthSummary run_synth(const Config& config, const std::filesystem::path& out_dir);

}  // namespace tilc

#endif  // TILC_PIPELINE_HPP
