/* Copyright 2026 The tilcurate Authors
 * SPDX-License-Identifier: Apache-2.0
 */

/* C interface to the tilcurate toolkit.
 *
 * Every fallible call returns a tilc_status. On failure a description is
 * available from tilc_last_error(), which is per-thread and valid until the
 * next failing call on that thread. Handles are opaque and owned by the
 * caller once created; release them with the matching *_destroy function.
 */

#ifndef TILC_TILC_H
#define TILC_TILC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef TILC_BUILDING_LIBRARY
#    define TILC_API __declspec(dllexport)
#  else
#    define TILC_API __declspec(dllimport)
#  endif
#else
#  define TILC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tilc_status {
  TILC_OK = 0,
  TILC_ERR_PARSE = 1,
  TILC_ERR_SCHEMA = 2,
  TILC_ERR_REFERENCE = 3,
  TILC_ERR_IO = 4,
  TILC_ERR_CONFIG = 5,
  TILC_ERR_INVARIANT = 6,
  TILC_ERR_CONTRACT = 7,
  TILC_ERR_INVALID_ARGUMENT = 8, /* null handle or out-of-range index */
  TILC_ERR_INTERNAL = 9
} tilc_status;

typedef struct tilc_config tilc_config;
typedef struct tilc_text tilc_text;
typedef struct tilc_eval_result tilc_eval_result;

typedef void (*tilc_log_fn)(const char* line, void* user);

TILC_API const char* tilc_version(void);
TILC_API const char* tilc_last_error(void);
TILC_API const char* tilc_status_name(tilc_status status);
/* 0 on success, 1 for input errors, 2 for contract/invariant violations and
   internal failures. */
TILC_API int tilc_exit_code(tilc_status status);

/* Route log lines to `fn` (NULL silences logging). Default: stderr. */
TILC_API void tilc_set_log_callback(tilc_log_fn fn, void* user);

/* --- configuration ------------------------------------------------------ */
TILC_API tilc_status tilc_config_create(tilc_config** out);
TILC_API void tilc_config_destroy(tilc_config* config);
TILC_API tilc_status tilc_config_set(tilc_config* config, const char* key,
                                     const char* value);
TILC_API tilc_status tilc_config_load_file(tilc_config* config, const char* path);
/* Copies the value into a new text handle. */
TILC_API tilc_status tilc_config_get(const tilc_config* config, const char* key,
                                     tilc_text** out);
/* All effective values as "key = value" lines, sorted by key. */
TILC_API tilc_status tilc_config_dump(const tilc_config* config, tilc_text** out);

/* --- text buffers -------------------------------------------------------- */
TILC_API const char* tilc_text_data(const tilc_text* text);
TILC_API size_t tilc_text_size(const tilc_text* text);
TILC_API void tilc_text_destroy(tilc_text* text);

/* --- pipeline ------------------------------------------------------------ */

/* Patch-size histogram of a COCO file as "bin_start,count" CSV. */
TILC_API tilc_status tilc_stats(const tilc_config* config, const char* coco_path,
                                tilc_text** csv_out);

typedef struct tilc_curate_summary {
  uint64_t sources;
  uint64_t records;
  uint64_t passthrough;
  uint64_t tiled;
  uint64_t stretched;
  uint64_t dropped_boxes;
  uint64_t invalid_boxes;
  uint64_t fallback_cells;
} tilc_curate_summary;

/* Writes <out_dir>/images/<name>.png, <out_dir>/labels/<name>.txt and
 * <out_dir>/manifest.json. `summary` may be NULL. */
TILC_API tilc_status tilc_curate(const tilc_config* config, const char* coco_path,
                                 const char* image_dir, const char* out_dir,
                                 tilc_curate_summary* summary);

typedef struct tilc_postprocess_summary {
  uint64_t input;
  uint64_t after_filter;
  uint64_t output;
} tilc_postprocess_summary;

/* `manifest_path` may be NULL; when given, tile predictions are stitched
 * into per-source slide coordinates. */
TILC_API tilc_status tilc_postprocess(const tilc_config* config,
                                      const char* predictions_in,
                                      const char* predictions_out,
                                      const char* manifest_path,
                                      tilc_postprocess_summary* summary);

TILC_API tilc_status tilc_eval(const tilc_config* config, const char* gt_coco_path,
                               const char* predictions_path, tilc_eval_result** out);
TILC_API void tilc_eval_result_destroy(tilc_eval_result* result);
TILC_API double tilc_eval_score(const tilc_eval_result* result);
TILC_API double tilc_eval_precision(const tilc_eval_result* result);
TILC_API double tilc_eval_recall(const tilc_eval_result* result);
TILC_API size_t tilc_eval_point_count(const tilc_eval_result* result);
TILC_API tilc_status tilc_eval_point(const tilc_eval_result* result, size_t index,
                                     double* threshold, double* fp_per_mm2,
                                     double* sensitivity);
TILC_API tilc_status tilc_eval_write_csv(const tilc_eval_result* result,
                                         const char* path);

typedef struct tilc_synth_summary {
  uint64_t images;
  uint64_t boxes;
  uint64_t detections;
} tilc_synth_summary;

/* Writes <out_dir>/images/<name>.png, <out_dir>/coco.json and, when the
 * synth_predictions option is on, <out_dir>/predictions.json. */
TILC_API tilc_status tilc_synth(const tilc_config* config, const char* out_dir,
                                tilc_synth_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* TILC_TILC_H */
