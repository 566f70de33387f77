// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the toolkit only through the C API.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tilc/tilc.h"

namespace {

struct ConfigDeleter {
  void operator()(tilc_config* c) const { tilc_config_destroy(c); }
};
struct TextDeleter {
  void operator()(tilc_text* t) const { tilc_text_destroy(t); }
};
struct EvalDeleter {
  void operator()(tilc_eval_result* r) const { tilc_eval_result_destroy(r); }
};
using ConfigPtr = std::unique_ptr<tilc_config, ConfigDeleter>;
using TextPtr = std::unique_ptr<tilc_text, TextDeleter>;
using EvalPtr = std::unique_ptr<tilc_eval_result, EvalDeleter>;

/// Command-line values that map 1:1 onto config keys. Only options the user
/// actually passed are applied, so a config file keeps its values otherwise.
class KeyOptions {
 public:
  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    auto& slot = values_[key];
    options_.emplace_back(app->add_option(flag, slot, help), key);
  }
  void add_switch(CLI::App* app, const std::string& flag, const std::string& key,
                  const std::string& value, const std::string& help) {
    switches_.emplace_back(app->add_flag(flag, help), key, value);
  }
  std::vector<std::pair<std::string, std::string>> given() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [opt, key] : options_)
      if (opt->count() > 0) out.emplace_back(key, values_.at(key));
    for (const auto& [opt, key, value] : switches_)
      if (opt->count() > 0) out.emplace_back(key, value);
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::pair<CLI::Option*, std::string>> options_;
  std::vector<std::tuple<CLI::Option*, std::string, std::string>> switches_;
};

int report(tilc_status status) {
  if (status != TILC_OK)
    std::cerr << "error (" << tilc_status_name(status) << "): " << tilc_last_error() << '\n';
  return tilc_exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Histology lymphocyte dataset curation and FROC evaluation"};
  app.require_subcommand(1);

  std::string config_file;
  bool quiet = false;
  bool verbose = false;
  KeyOptions keys;
  app.add_option("--config", config_file, "key = value config file (flags override it)");
  app.add_flag("-q,--quiet", quiet, "suppress log output");
  app.add_flag("-v,--verbose", verbose, "log the full effective configuration");
  keys.add(&app, "--jobs", "jobs", "worker threads");

  // stats
  std::string stats_coco, stats_out;
  auto* stats = app.add_subcommand("stats", "print the patch-size histogram as CSV");
  stats->add_option("--coco", stats_coco, "COCO annotation file")->required();
  stats->add_option("--out", stats_out, "write the CSV here instead of stdout");
  keys.add(stats, "--bin", "bin", "histogram bin width in pixels");
  keys.add(stats, "--target", "target", "tile size used for the routing summary");

  // curate
  std::string cur_coco, cur_images, cur_out;
  auto* curate = app.add_subcommand("curate", "build a 256x256 training set");
  curate->add_option("--coco", cur_coco, "COCO annotation file")->required();
  curate->add_option("--images", cur_images, "directory holding the ROI images")->required();
  curate->add_option("--out", cur_out, "output directory")->required();
  keys.add(curate, "--variant", "variant", "padded | optimized");
  keys.add(curate, "--seed", "seed", "global seed");
  keys.add(curate, "--lambda", "lambda", "mean number of transplanted cells");
  keys.add(curate, "--max-cells", "max_cells", "cap on transplanted cells per patch");
  keys.add(curate, "--target", "target", "output patch size");
  keys.add(curate, "--mpp", "mpp", "microns per pixel of the sources");
  keys.add(curate, "--feather", "feather", "donor crop feather width in pixels");
  keys.add(curate, "--map-category", "map_category", "NAME=ID[,NAME=ID...] class mapping");
  keys.add_switch(curate, "--all-categories", "all_categories", "true",
                  "map every category to a dense class id");

  // postprocess
  std::string pp_in, pp_out, pp_manifest;
  auto* post = app.add_subcommand("postprocess", "refine detector predictions");
  post->add_option("--pred", pp_in, "input predictions JSON")->required();
  post->add_option("--out", pp_out, "output predictions JSON")->required();
  post->add_option("--manifest", pp_manifest, "curation manifest; stitches tiles to slides");
  keys.add(post, "--min-size", "min_size", "minimum box extent in pixels");
  keys.add(post, "--max-size", "max_size", "maximum box extent in pixels");
  keys.add(post, "--dedup-radius", "dedup_radius", "cross-tile duplicate radius in pixels");
  keys.add(post, "--border-eps", "border_eps", "border contact tolerance in pixels");
  keys.add(post, "--patch-size", "patch_size", "predicted patch size in pixels");

  // eval
  std::string ev_gt, ev_pred, ev_csv = "froc.csv";
  auto* eval = app.add_subcommand("eval", "FROC score and precision/recall");
  eval->add_option("--gt", ev_gt, "ground-truth COCO file")->required();
  eval->add_option("--pred", ev_pred, "predictions JSON")->required();
  eval->add_option("--csv", ev_csv, "FROC curve output")->capture_default_str();
  keys.add(eval, "--mpp", "mpp", "microns per pixel");
  keys.add(eval, "--radius", "radius", "hit radius in pixels");
  keys.add(eval, "--ops", "ops", "comma-separated FP/mm2 operating points");
  keys.add(eval, "--conf", "conf", "confidence threshold for precision/recall");
  keys.add(eval, "--map-category", "map_category", "NAME=ID[,NAME=ID...] class mapping");
  keys.add_switch(eval, "--all-categories", "all_categories", "true",
                  "map every category to a dense class id");

  // synth
  std::string syn_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic annotated corpus");
  synth->add_option("--out", syn_out, "output directory")->required();
  keys.add(synth, "--count", "synth_count", "number of images");
  keys.add(synth, "--seed", "seed", "global seed");
  keys.add(synth, "--mpp", "mpp", "microns per pixel");
  keys.add(synth, "--large-fraction", "synth_large_fraction", "share of large patches");
  keys.add(synth, "--small-min", "synth_small_min", "smallest small-patch size");
  keys.add(synth, "--small-max", "synth_small_max", "largest small-patch size");
  keys.add(synth, "--large-min", "synth_large_min", "smallest large-patch size");
  keys.add(synth, "--large-max", "synth_large_max", "largest large-patch size");
  keys.add(synth, "--cell-density", "synth_cell_density", "cells per 10^4 px^2");
  keys.add(synth, "--tp-rate", "synth_tp_rate", "detection probability per cell");
  keys.add(synth, "--fp-per-mm2", "synth_fp_per_mm2", "false positives per mm2");
  keys.add(synth, "--jitter", "synth_jitter", "center jitter radius in pixels");
  keys.add_switch(synth, "--no-predictions", "synth_predictions", "false",
                  "skip predictions.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (quiet) tilc_set_log_callback(nullptr, nullptr);

  tilc_config* raw = nullptr;
  if (tilc_config_create(&raw) != TILC_OK) return report(TILC_ERR_INTERNAL);
  ConfigPtr config(raw);
  if (!config_file.empty())
    if (auto s = tilc_config_load_file(config.get(), config_file.c_str()); s != TILC_OK)
      return report(s);
  for (const auto& [key, value] : keys.given())
    if (auto s = tilc_config_set(config.get(), key.c_str(), value.c_str()); s != TILC_OK)
      return report(s);

  if (verbose && !quiet) {
    tilc_text* dump = nullptr;
    if (tilc_config_dump(config.get(), &dump) == TILC_OK) {
      TextPtr d(dump);
      std::cerr << "effective configuration:\n" << tilc_text_data(d.get());
    }
  }

  if (stats->parsed()) {
    tilc_text* csv = nullptr;
    if (auto s = tilc_stats(config.get(), stats_coco.c_str(), &csv); s != TILC_OK) return report(s);
    TextPtr text(csv);
    if (stats_out.empty()) {
      std::fwrite(tilc_text_data(text.get()), 1, tilc_text_size(text.get()), stdout);
    } else {
      FILE* f = std::fopen(stats_out.c_str(), "wb");
      if (!f) {
        std::cerr << "error: cannot write '" << stats_out << "'\n";
        return 1;
      }
      std::fwrite(tilc_text_data(text.get()), 1, tilc_text_size(text.get()), f);
      std::fclose(f);
    }
    return 0;
  }

  if (curate->parsed()) {
    tilc_curate_summary summary{};
    return report(tilc_curate(config.get(), cur_coco.c_str(), cur_images.c_str(), cur_out.c_str(),
                              &summary));
  }

  if (post->parsed()) {
    return report(tilc_postprocess(config.get(), pp_in.c_str(), pp_out.c_str(),
                                   pp_manifest.empty() ? nullptr : pp_manifest.c_str(), nullptr));
  }

  if (eval->parsed()) {
    tilc_eval_result* raw_result = nullptr;
    if (auto s = tilc_eval(config.get(), ev_gt.c_str(), ev_pred.c_str(), &raw_result); s != TILC_OK)
      return report(s);
    EvalPtr result(raw_result);
    if (auto s = tilc_eval_write_csv(result.get(), ev_csv.c_str()); s != TILC_OK) return report(s);
    tilc_text* conf = nullptr;
    tilc_config_get(config.get(), "conf", &conf);
    TextPtr conf_text(conf);
    std::printf("FROC score: %.4f\n", tilc_eval_score(result.get()));
    std::printf("precision@%s: %.4f\n", tilc_text_data(conf_text.get()),
                tilc_eval_precision(result.get()));
    std::printf("recall@%s: %.4f\n", tilc_text_data(conf_text.get()),
                tilc_eval_recall(result.get()));
    std::printf("curve points: %zu (written to %s)\n", tilc_eval_point_count(result.get()),
                ev_csv.c_str());
    return 0;
  }

  if (synth->parsed()) {
    tilc_synth_summary summary{};
    return report(tilc_synth(config.get(), syn_out.c_str(), &summary));
  }
  return 1;
}
