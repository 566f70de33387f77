// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/tilc.h"

#include <exception>
#include <new>
#include <string>

#include "tilc/error.hpp"
#include "tilc/pipeline.hpp"

struct tilc_config {
  tilc::Config config;
};

struct tilc_text {
  std::string data;
};

struct tilc_eval_result {
  tilc::EvalReport report;
};

namespace {

thread_local std::string g_last_error;

tilc_status status_for(tilc::ErrorKind kind) {
  switch (kind) {
    case tilc::ErrorKind::Parse: return TILC_ERR_PARSE;
    case tilc::ErrorKind::Schema: return TILC_ERR_SCHEMA;
    case tilc::ErrorKind::Reference: return TILC_ERR_REFERENCE;
    case tilc::ErrorKind::Io: return TILC_ERR_IO;
    case tilc::ErrorKind::Config: return TILC_ERR_CONFIG;
    case tilc::ErrorKind::Invariant: return TILC_ERR_INVARIANT;
    case tilc::ErrorKind::Contract: return TILC_ERR_CONTRACT;
  }
  return TILC_ERR_INTERNAL;
}

tilc_status fail(tilc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
tilc_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return TILC_OK;
  } catch (const tilc::Error& e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(TILC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TILC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TILC_ERR_INTERNAL, "unknown error");
  }
}

#define TILC_REQUIRE(cond, what) \
  if (!(cond)) return fail(TILC_ERR_INVALID_ARGUMENT, what)

tilc_text* new_text(std::string s) { return new tilc_text{std::move(s)}; }

}  // namespace

extern "C" {

const char* tilc_version(void) { return tilc::kPipelineVersion; }

const char* tilc_last_error(void) { return g_last_error.c_str(); }

const char* tilc_status_name(tilc_status status) {
  switch (status) {
    case TILC_OK: return "ok";
    case TILC_ERR_PARSE: return "parse error";
    case TILC_ERR_SCHEMA: return "schema error";
    case TILC_ERR_REFERENCE: return "reference error";
    case TILC_ERR_IO: return "I/O error";
    case TILC_ERR_CONFIG: return "configuration error";
    case TILC_ERR_INVARIANT: return "invariant violation";
    case TILC_ERR_CONTRACT: return "contract violation";
    case TILC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TILC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int tilc_exit_code(tilc_status status) {
  switch (status) {
    case TILC_OK: return 0;
    case TILC_ERR_INVARIANT:
    case TILC_ERR_CONTRACT:
    case TILC_ERR_INTERNAL: return 2;
    default: return 1;
  }
}

void tilc_set_log_callback(tilc_log_fn fn, void* user) {
  if (!fn) {
    tilc::set_log_sink({});
    return;
  }
  tilc::set_log_sink([fn, user](std::string_view line) {
    const std::string copy(line);
    fn(copy.c_str(), user);
  });
}

tilc_status tilc_config_create(tilc_config** out) {
  TILC_REQUIRE(out, "tilc_config_create: out is null");
  return guarded([&] { *out = new tilc_config{}; });
}

void tilc_config_destroy(tilc_config* config) { delete config; }

tilc_status tilc_config_set(tilc_config* config, const char* key, const char* value) {
  TILC_REQUIRE(config && key && value, "tilc_config_set: null argument");
  return guarded([&] { config->config.set(key, value); });
}

tilc_status tilc_config_load_file(tilc_config* config, const char* path) {
  TILC_REQUIRE(config && path, "tilc_config_load_file: null argument");
  return guarded([&] { config->config.load_file(path); });
}

tilc_status tilc_config_get(const tilc_config* config, const char* key, tilc_text** out) {
  TILC_REQUIRE(config && key && out, "tilc_config_get: null argument");
  return guarded([&] { *out = new_text(config->config.get(key)); });
}

tilc_status tilc_config_dump(const tilc_config* config, tilc_text** out) {
  TILC_REQUIRE(config && out, "tilc_config_dump: null argument");
  return guarded([&] {
    std::string s;
    for (const auto& [k, v] : config->config.values()) s += k + " = " + v + "\n";
    *out = new_text(std::move(s));
  });
}

const char* tilc_text_data(const tilc_text* text) { return text ? text->data.c_str() : ""; }

size_t tilc_text_size(const tilc_text* text) { return text ? text->data.size() : 0; }

void tilc_text_destroy(tilc_text* text) { delete text; }

tilc_status tilc_stats(const tilc_config* config, const char* coco_path, tilc_text** csv_out) {
  TILC_REQUIRE(config && coco_path && csv_out, "tilc_stats: null argument");
  return guarded([&] { *csv_out = new_text(tilc::run_stats(config->config, coco_path)); });
}

tilc_status tilc_curate(const tilc_config* config, const char* coco_path, const char* image_dir,
                        const char* out_dir, tilc_curate_summary* summary) {
  TILC_REQUIRE(config && coco_path && image_dir && out_dir, "tilc_curate: null argument");
  return guarded([&] {
    const auto s = tilc::run_curate(config->config, coco_path, image_dir, out_dir);
    if (summary)
      *summary = {s.sources,   s.records,       s.passthrough,   s.tiled,
                  s.stretched, s.dropped_boxes, s.invalid_boxes, s.fallback_cells};
  });
}

tilc_status tilc_postprocess(const tilc_config* config, const char* predictions_in,
                             const char* predictions_out, const char* manifest_path,
                             tilc_postprocess_summary* summary) {
  TILC_REQUIRE(config && predictions_in && predictions_out, "tilc_postprocess: null argument");
  return guarded([&] {
    std::optional<std::filesystem::path> manifest;
    if (manifest_path) manifest = manifest_path;
    const auto s = tilc::run_postprocess(config->config, predictions_in, predictions_out, manifest);
    if (summary) *summary = {s.input, s.after_filter, s.output};
  });
}

tilc_status tilc_eval(const tilc_config* config, const char* gt_coco_path,
                      const char* predictions_path, tilc_eval_result** out) {
  TILC_REQUIRE(config && gt_coco_path && predictions_path && out, "tilc_eval: null argument");
  return guarded([&] {
    *out = new tilc_eval_result{tilc::run_eval(config->config, gt_coco_path, predictions_path)};
  });
}

void tilc_eval_result_destroy(tilc_eval_result* result) { delete result; }

double tilc_eval_score(const tilc_eval_result* result) { return result ? result->report.score : 0; }

double tilc_eval_precision(const tilc_eval_result* result) {
  return result ? result->report.pr.precision : 0;
}

double tilc_eval_recall(const tilc_eval_result* result) {
  return result ? result->report.pr.recall : 0;
}

size_t tilc_eval_point_count(const tilc_eval_result* result) {
  return result ? result->report.curve.points.size() : 0;
}

tilc_status tilc_eval_point(const tilc_eval_result* result, size_t index, double* threshold,
                            double* fp_per_mm2, double* sensitivity) {
  TILC_REQUIRE(result, "tilc_eval_point: null result");
  TILC_REQUIRE(index < result->report.curve.points.size(), "tilc_eval_point: index out of range");
  const auto& p = result->report.curve.points[index];
  if (threshold) *threshold = p.threshold;
  if (fp_per_mm2) *fp_per_mm2 = p.fp_per_mm2;
  if (sensitivity) *sensitivity = p.sensitivity;
  return TILC_OK;
}

tilc_status tilc_eval_write_csv(const tilc_eval_result* result, const char* path) {
  TILC_REQUIRE(result && path, "tilc_eval_write_csv: null argument");
  return guarded([&] { tilc::write_text_file(path, tilc::froc_csv(result->report.curve)); });
}

tilc_status tilc_synth(const tilc_config* config, const char* out_dir,
                       tilc_synth_summary* summary) {
  TILC_REQUIRE(config && out_dir, "tilc_synth: null argument");
  return guarded([&] {
    const auto s = tilc::run_synth(config->config, out_dir);
    if (summary) *summary = {s.images, s.boxes, s.detections};
  });
}

}  // extern "C"
