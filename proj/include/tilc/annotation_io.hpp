// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_ANNOTATION_IO_HPP
#define TILC_ANNOTATION_IO_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tilc {

inline constexpr const char* kPipelineVersion = "tilcurate-1.0";
inline constexpr double kDefaultMpp = 0.5;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Owned 8-bit RGB raster, row-major, three samples per pixel.
class PixelPatch {
 public:
  PixelPatch(std::uint32_t width, std::uint32_t height, double mpp = kDefaultMpp,
             Rgb fill = {});
  PixelPatch(std::uint32_t width, std::uint32_t height,
             std::vector<std::uint8_t> samples, double mpp = kDefaultMpp);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  double mpp() const noexcept { return mpp_; }
  void set_mpp(double mpp);

  std::uint8_t* px(std::uint32_t x, std::uint32_t y) noexcept {
    return samples_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  const std::uint8_t* px(std::uint32_t x, std::uint32_t y) const noexcept {
    return samples_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  Rgb at(std::uint32_t x, std::uint32_t y) const noexcept {
    const auto* p = px(x, y);
    return {p[0], p[1], p[2]};
  }
  void set(std::uint32_t x, std::uint32_t y, Rgb c) noexcept {
    auto* p = px(x, y);
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }
  std::span<std::uint8_t> samples() noexcept { return samples_; }

  /// Copy of the rectangle [x, x+w) × [y, y+h). Throws ContractError when the
  /// rectangle leaves the raster.
  PixelPatch crop(std::uint32_t x, std::uint32_t y, std::uint32_t w,
                  std::uint32_t h) const;
  /// Overwrite the rectangle at (x, y) with all of `src`.
  void blit(const PixelPatch& src, std::uint32_t x, std::uint32_t y);
  std::array<double, 3> mean_rgb() const;

  bool operator==(const PixelPatch& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           samples_ == other.samples_;
  }

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  double mpp_;
  std::vector<std::uint8_t> samples_;
};

/// Axis-aligned box in patch pixel coordinates; covers [x_min, x_min+width).
struct BBox {
  double x_min = 0;
  double y_min = 0;
  double width = 0;
  double height = 0;
  int class_id = 0;

  double x_max() const noexcept { return x_min + width; }
  double y_max() const noexcept { return y_min + height; }
  double cx() const noexcept { return x_min + width / 2; }
  double cy() const noexcept { return y_min + height / 2; }
  double area() const noexcept { return width * height; }
  bool operator==(const BBox&) const = default;
};

bool contained_in(const BBox& box, double width, double height) noexcept;
double intersection_area(const BBox& a, const BBox& b) noexcept;
double iou(const BBox& a, const BBox& b) noexcept;

/// Offset of the patch's (0,0) in source coordinates: source = local + origin.
struct Origin {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const Origin&) const = default;
  auto operator<=>(const Origin&) const = default;
};

struct AnnotatedPatch {
  PixelPatch patch;
  std::vector<BBox> boxes;
  std::string source_id;
  Origin origin;

  /// Throws InvariantError naming the first box that leaves the patch.
  void validate() const;
};

// ---------------------------------------------------------------------------
// COCO subset: images / annotations / categories. Segmentation is ignored.

struct CocoImage {
  std::int64_t id = 0;
  std::string file_name;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<BBox> boxes;
};

struct CocoCategory {
  std::int64_t id = 0;
  std::string name;
  int class_id = -1;  // -1: not mapped (annotations referencing it are rejected)
};

struct CocoDataset {
  std::vector<CocoImage> images;
  std::vector<CocoCategory> categories;
};

struct CocoParseOptions {
  /// Map every category to a dense id, in ascending category-id order.
  bool all_categories = false;
  /// Explicit name -> class id overrides.
  std::map<std::string, int> category_map;
};

CocoDataset parse_coco(std::string_view json_text,
                       const CocoParseOptions& options = {});
CocoDataset read_coco(const std::filesystem::path& path,
                      const CocoParseOptions& options = {});
/// Writes mapped categories only; class ids are written back as category ids.
std::string emit_coco(const CocoDataset& dataset);

// ---------------------------------------------------------------------------
// YOLO labels: "<class> <cx> <cy> <w> <h>\n", normalized, six decimals.

std::string emit_yolo(const AnnotatedPatch& patch);
std::vector<BBox> parse_yolo(std::string_view text, std::uint32_t width,
                             std::uint32_t height);

// ---------------------------------------------------------------------------
// PNG. 8-bit gray/RGB/RGBA/palette input; alpha is dropped. mpp travels in
// the pHYs chunk when present.

PixelPatch decode_png(std::span<const std::uint8_t> bytes,
                      double default_mpp = kDefaultMpp);
std::vector<std::uint8_t> encode_png(const PixelPatch& patch);
PixelPatch load_image(const std::filesystem::path& path,
                      double default_mpp = kDefaultMpp);
void save_image(const PixelPatch& patch, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Dataset manifest.

struct ManifestRecord {
  std::string image_path;
  std::string label_path;
  std::string source_id;
  Origin origin;
  std::string variant;
  std::int64_t dropped_box_count = 0;
  bool operator==(const ManifestRecord&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::uint64_t global_seed = 0;
  std::string pipeline_version = kPipelineVersion;
  std::map<std::string, std::string> config;
  bool operator==(const DatasetManifest&) const = default;
};

struct LoadedManifest {
  DatasetManifest manifest;
  std::vector<std::string> warnings;
};

std::string manifest_to_json(const DatasetManifest& manifest);
LoadedManifest manifest_from_json(std::string_view text);
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);
LoadedManifest read_manifest(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace tilc

#endif  // TILC_ANNOTATION_IO_HPP
