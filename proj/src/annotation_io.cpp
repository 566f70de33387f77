// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#include "tilc/annotation_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tilc/error.hpp"

namespace tilc {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// PixelPatch

PixelPatch::PixelPatch(std::uint32_t width, std::uint32_t height, double mpp, Rgb fill)
    : width_(width), height_(height), mpp_(mpp) {
  if (width == 0 || height == 0)
    throw InvariantError("PixelPatch dimensions must be >= 1");
  set_mpp(mpp);
  samples_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < samples_.size(); i += 3) {
    samples_[i] = fill.r;
    samples_[i + 1] = fill.g;
    samples_[i + 2] = fill.b;
  }
}

PixelPatch::PixelPatch(std::uint32_t width, std::uint32_t height,
                       std::vector<std::uint8_t> samples, double mpp)
    : width_(width), height_(height), mpp_(mpp), samples_(std::move(samples)) {
  if (width == 0 || height == 0)
    throw InvariantError("PixelPatch dimensions must be >= 1");
  if (samples_.size() != static_cast<std::size_t>(width) * height * 3)
    throw InvariantError("PixelPatch sample count must equal width*height*3");
  set_mpp(mpp);
}

void PixelPatch::set_mpp(double mpp) {
  if (!(mpp > 0) || !std::isfinite(mpp))
    throw InvariantError("PixelPatch mpp must be positive");
  mpp_ = mpp;
}

PixelPatch PixelPatch::crop(std::uint32_t x, std::uint32_t y, std::uint32_t w,
                            std::uint32_t h) const {
  if (w == 0 || h == 0 || std::uint64_t{x} + w > width_ || std::uint64_t{y} + h > height_)
    throw ContractError("crop rectangle outside raster");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h * 3);
  for (std::uint32_t row = 0; row < h; ++row)
    std::copy_n(px(x, y + row), std::size_t{w} * 3, out.data() + std::size_t{row} * w * 3);
  return PixelPatch(w, h, std::move(out), mpp_);
}

void PixelPatch::blit(const PixelPatch& src, std::uint32_t x, std::uint32_t y) {
  if (std::uint64_t{x} + src.width() > width_ || std::uint64_t{y} + src.height() > height_)
    throw ContractError("blit destination outside raster");
  for (std::uint32_t row = 0; row < src.height(); ++row)
    std::copy_n(src.px(0, row), std::size_t{src.width()} * 3, px(x, y + row));
}

std::array<double, 3> PixelPatch::mean_rgb() const {
  std::array<std::uint64_t, 3> sum{};
  for (std::size_t i = 0; i < samples_.size(); i += 3) {
    sum[0] += samples_[i];
    sum[1] += samples_[i + 1];
    sum[2] += samples_[i + 2];
  }
  const double n = static_cast<double>(samples_.size() / 3);
  return {sum[0] / n, sum[1] / n, sum[2] / n};
}

// ---------------------------------------------------------------------------
// Boxes

bool contained_in(const BBox& box, double width, double height) noexcept {
  return box.x_min >= 0 && box.y_min >= 0 && box.width > 0 && box.height > 0 &&
         box.x_max() <= width && box.y_max() <= height;
}

double intersection_area(const BBox& a, const BBox& b) noexcept {
  const double w = std::min(a.x_max(), b.x_max()) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max(), b.y_max()) - std::max(a.y_min, b.y_min);
  return (w > 0 && h > 0) ? w * h : 0.0;
}

double iou(const BBox& a, const BBox& b) noexcept {
  const double inter = intersection_area(a, b);
  if (inter <= 0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

void AnnotatedPatch::validate() const {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!contained_in(boxes[i], patch.width(), patch.height())) {
      std::ostringstream msg;
      msg << "box " << i << " of '" << source_id << "' (" << boxes[i].x_min << ","
          << boxes[i].y_min << "," << boxes[i].width << "," << boxes[i].height
          << ") is not inside the " << patch.width() << "x" << patch.height() << " patch";
      throw InvariantError(msg.str());
    }
  }
}

// ---------------------------------------------------------------------------
// COCO

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const json& require(const json& obj, const char* field, const std::string& where) {
  if (!obj.is_object()) throw SchemaError("'" + where + "' must be an object");
  auto it = obj.find(field);
  if (it == obj.end())
    throw SchemaError("missing required field '" + where + "." + field + "'");
  return *it;
}

const json& require_array(const json& obj, const char* field, const std::string& where) {
  const json& v = require(obj, field, where);
  if (!v.is_array())
    throw SchemaError("field '" + where + "." + field + "' must be an array");
  return v;
}

std::int64_t require_int(const json& obj, const char* field, const std::string& where) {
  const json& v = require(obj, field, where);
  if (!v.is_number_integer())
    throw SchemaError("field '" + where + "." + field + "' must be an integer");
  return v.get<std::int64_t>();
}

double require_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError("field '" + where + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError("field '" + where + "' must be finite");
  return d;
}

}  // namespace

CocoDataset parse_coco(std::string_view json_text, const CocoParseOptions& options) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed COCO JSON: ") + e.what(), e.byte);
  }
  if (!root.is_object()) throw SchemaError("COCO root must be an object");

  const json& images = require_array(root, "images", "coco");
  const json& annotations = require_array(root, "annotations", "coco");
  // A file without annotations may omit the category list.
  static const json kNoCategories = json::array();
  const json& categories = (annotations.empty() && !root.contains("categories"))
                               ? kNoCategories
                               : require_array(root, "categories", "coco");

  CocoDataset out;

  // Categories and their class mapping.
  std::map<std::int64_t, std::size_t> category_index;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const std::string where = "categories[" + std::to_string(i) + "]";
    CocoCategory cat;
    cat.id = require_int(categories[i], "id", where);
    const json& name = require(categories[i], "name", where);
    if (!name.is_string()) throw SchemaError("field '" + where + ".name' must be a string");
    cat.name = name.get<std::string>();
    if (!category_index.emplace(cat.id, out.categories.size()).second)
      throw SchemaError("duplicate category id " + std::to_string(cat.id));
    out.categories.push_back(std::move(cat));
  }
  if (options.all_categories) {
    int next = 0;
    for (auto& [id, idx] : category_index) out.categories[idx].class_id = next++;
  } else {
    for (auto& cat : out.categories) {
      if (auto it = options.category_map.find(cat.name); it != options.category_map.end())
        cat.class_id = it->second;
      else if (lower(cat.name).starts_with("lymphocyte"))
        cat.class_id = 0;
    }
  }

  std::map<std::int64_t, std::size_t> image_index;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    CocoImage img;
    img.id = require_int(images[i], "id", where);
    const std::int64_t w = require_int(images[i], "width", where);
    const std::int64_t h = require_int(images[i], "height", where);
    if (w < 1 || h < 1 || w > 0xFFFFFFFFLL || h > 0xFFFFFFFFLL)
      throw SchemaError("'" + where + "' width/height must be >= 1");
    img.width = static_cast<std::uint32_t>(w);
    img.height = static_cast<std::uint32_t>(h);
    if (auto it = images[i].find("file_name"); it != images[i].end()) {
      if (!it->is_string()) throw SchemaError("field '" + where + ".file_name' must be a string");
      img.file_name = it->get<std::string>();
    }
    if (!image_index.emplace(img.id, out.images.size()).second)
      throw SchemaError("duplicate image id " + std::to_string(img.id));
    out.images.push_back(std::move(img));
  }

  std::vector<std::int64_t> dangling;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const std::string where = "annotations[" + std::to_string(i) + "]";
    const json& ann = annotations[i];
    const std::int64_t image_id = require_int(ann, "image_id", where);
    const std::int64_t category_id = require_int(ann, "category_id", where);
    const json& bbox = require(ann, "bbox", where);
    if (!bbox.is_array() || bbox.size() != 4)
      throw SchemaError("field '" + where + ".bbox' must be [x, y, w, h]");
    BBox box;
    box.x_min = require_number(bbox[0], where + ".bbox[0]");
    box.y_min = require_number(bbox[1], where + ".bbox[1]");
    box.width = require_number(bbox[2], where + ".bbox[2]");
    box.height = require_number(bbox[3], where + ".bbox[3]");
    if (box.width <= 0 || box.height <= 0)
      throw SchemaError("'" + where + ".bbox' must have positive width and height");

    auto cat = category_index.find(category_id);
    if (cat == category_index.end())
      throw ReferenceError(where + " references unknown category_id " +
                           std::to_string(category_id));
    const CocoCategory& category = out.categories[cat->second];
    if (category.class_id < 0)
      throw SchemaError("category '" + category.name + "' (id " + std::to_string(category.id) +
                        ") is not a lymphocyte class; map it explicitly or enable all categories");
    box.class_id = category.class_id;

    auto img = image_index.find(image_id);
    if (img == image_index.end()) {
      dangling.push_back(image_id);
      continue;
    }
    out.images[img->second].boxes.push_back(box);
  }
  if (!dangling.empty()) {
    std::set<std::int64_t> unique(dangling.begin(), dangling.end());
    std::string ids;
    for (auto id : unique) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    throw ReferenceError("annotations reference unknown image_id(s): " + ids);
  }
  return out;
}

CocoDataset read_coco(const std::filesystem::path& path, const CocoParseOptions& options) {
  const std::string text = read_text_file(path);
  try {
    return parse_coco(text, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte_offset());
  } catch (const Error& e) {
    // Re-throw with the file name prepended, keeping the kind.
    const std::string msg = path.string() + ": " + e.what();
    switch (e.kind()) {
      case ErrorKind::Schema: throw SchemaError(msg);
      case ErrorKind::Reference: throw ReferenceError(msg);
      default: throw;
    }
  }
}

std::string emit_coco(const CocoDataset& dataset) {
  std::vector<CocoCategory> categories = dataset.categories;
  if (categories.empty()) categories.push_back({1, "lymphocyte", 0});

  auto category_for = [&](int class_id) {
    for (const auto& c : categories)
      if (c.class_id == class_id) return c.id;
    throw SchemaError("no category for class id " + std::to_string(class_id));
  };

  json root;
  root["images"] = json::array();
  root["annotations"] = json::array();
  root["categories"] = json::array();
  std::int64_t ann_id = 1;
  for (const auto& img : dataset.images) {
    root["images"].push_back({{"id", img.id},
                              {"file_name", img.file_name},
                              {"width", img.width},
                              {"height", img.height}});
    for (const auto& box : img.boxes) {
      root["annotations"].push_back({{"id", ann_id++},
                                     {"image_id", img.id},
                                     {"category_id", category_for(box.class_id)},
                                     {"bbox", {box.x_min, box.y_min, box.width, box.height}},
                                     {"area", box.area()},
                                     {"iscrowd", 0}});
    }
  }
  for (const auto& c : categories) {
    if (c.class_id < 0) continue;
    root["categories"].push_back({{"id", c.id}, {"name", c.name}});
  }
  return root.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// YOLO

std::string emit_yolo(const AnnotatedPatch& patch) {
  patch.validate();
  const double w = patch.patch.width();
  const double h = patch.patch.height();
  std::string out;
  char line[128];
  for (const auto& box : patch.boxes) {
    const int n = std::snprintf(line, sizeof line, "%d %.6f %.6f %.6f %.6f\n", box.class_id,
                                box.cx() / w, box.cy() / h, box.width / w, box.height / h);
    out.append(line, static_cast<std::size_t>(n));
  }
  return out;
}

std::vector<BBox> parse_yolo(std::string_view text, std::uint32_t width,
                             std::uint32_t height) {
  std::vector<BBox> boxes;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line(text.substr(pos, end - pos));
    if (!line.empty()) {
      std::istringstream in(line);
      int cls = 0;
      double cx = 0, cy = 0, w = 0, h = 0;
      std::string extra;
      if (!(in >> cls >> cx >> cy >> w >> h) || (in >> extra))
        throw ParseError("malformed YOLO line '" + line + "'", pos);
      if (cls < 0 || w <= 0 || h <= 0 || w > 1 || h > 1 || cx < 0 || cx > 1 || cy < 0 || cy > 1)
        throw ParseError("YOLO values out of range in '" + line + "'", pos);
      BBox box;
      box.class_id = cls;
      box.width = w * width;
      box.height = h * height;
      box.x_min = cx * width - box.width / 2;
      box.y_min = cy * height - box.height / 2;
      boxes.push_back(box);
    }
    pos = end + 1;
  }
  return boxes;
}

// ---------------------------------------------------------------------------
// Manifest

std::string manifest_to_json(const DatasetManifest& manifest) {
  std::set<std::string> images, labels;
  json records = json::array();
  for (const auto& r : manifest.records) {
    if (r.dropped_box_count < 0)
      throw InvariantError("manifest record '" + r.image_path + "' has negative dropped_box_count");
    if (!images.insert(r.image_path).second)
      throw InvariantError("duplicate manifest image path '" + r.image_path + "'");
    if (!labels.insert(r.label_path).second)
      throw InvariantError("duplicate manifest label path '" + r.label_path + "'");
    records.push_back({{"image_path", r.image_path},
                       {"label_path", r.label_path},
                       {"source_id", r.source_id},
                       {"origin", {r.origin.x, r.origin.y}},
                       {"variant", r.variant},
                       {"dropped_box_count", r.dropped_box_count}});
  }
  json root;
  root["pipeline_version"] = manifest.pipeline_version;
  root["global_seed"] = manifest.global_seed;
  root["config"] = manifest.config;
  root["records"] = std::move(records);
  return root.dump(2) + "\n";
}

LoadedManifest manifest_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed manifest JSON: ") + e.what(), e.byte);
  }
  LoadedManifest out;
  DatasetManifest& m = out.manifest;
  const json& version = require(root, "pipeline_version", "manifest");
  if (!version.is_string()) throw SchemaError("manifest.pipeline_version must be a string");
  m.pipeline_version = version.get<std::string>();
  if (m.pipeline_version != kPipelineVersion)
    out.warnings.push_back("manifest pipeline version '" + m.pipeline_version +
                           "' differs from this build ('" + kPipelineVersion + "')");
  const json& seed = require(root, "global_seed", "manifest");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
    throw SchemaError("manifest.global_seed must be a non-negative integer");
  m.global_seed = seed.get<std::uint64_t>();
  if (auto it = root.find("config"); it != root.end()) {
    if (!it->is_object()) throw SchemaError("manifest.config must be an object");
    for (auto& [k, v] : it->items()) {
      if (!v.is_string()) throw SchemaError("manifest.config." + k + " must be a string");
      m.config[k] = v.get<std::string>();
    }
  }
  const json& records = require_array(root, "records", "manifest");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string where = "manifest.records[" + std::to_string(i) + "]";
    const json& r = records[i];
    ManifestRecord rec;
    auto str = [&](const char* f) {
      const json& v = require(r, f, where);
      if (!v.is_string()) throw SchemaError("field '" + where + "." + f + "' must be a string");
      return v.get<std::string>();
    };
    rec.image_path = str("image_path");
    rec.label_path = str("label_path");
    rec.source_id = str("source_id");
    rec.variant = str("variant");
    const json& origin = require(r, "origin", where);
    if (!origin.is_array() || origin.size() != 2 || !origin[0].is_number_integer() ||
        !origin[1].is_number_integer())
      throw SchemaError("field '" + where + ".origin' must be [x, y] integers");
    rec.origin = {origin[0].get<std::int64_t>(), origin[1].get<std::int64_t>()};
    rec.dropped_box_count = require_int(r, "dropped_box_count", where);
    if (rec.dropped_box_count < 0)
      throw SchemaError("field '" + where + ".dropped_box_count' must be >= 0");
    m.records.push_back(std::move(rec));
  }
  return out;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  write_text_file(path, manifest_to_json(manifest));
}

LoadedManifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace tilc
