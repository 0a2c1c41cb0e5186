#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace smc {

/// Single-channel image with row-major intensities in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(int x, int y) const { return data_[index(x, y)]; }
  double& operator()(int x, int y) { return data_[index(x, y)]; }

  /// Clamped access; coordinates outside the image map to the nearest edge.
  double at_clamped(int x, int y) const;

  const std::vector<double>& data() const noexcept { return data_; }

  GrayImage crop(int x0, int y0, int w, int h) const;

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Decoded raster as it comes off disk: interleaved integer samples.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 gray, 2 gray+alpha, 3 RGB, 4 RGBA
  std::uint32_t max_value = 255;
  std::vector<std::uint16_t> samples;
};

struct RoiRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
};

struct RoiSpec {
  enum class Mode { Auto, Explicit };

  Mode mode = Mode::Auto;
  RoiRect rect;
  double threshold = 0.1;

  static RoiSpec automatic(double threshold = 0.1);
  static RoiSpec explicit_rect(RoiRect rect);

  /// Parses "auto:<threshold>" or "rect:x0,y0,w,h".
  static RoiSpec parse(const std::string& text);
  std::string to_string() const;
};

GrayImage to_grayscale(const Raster& raster);

/// Median over the (2r+1)^2 neighbourhood with edge replication at borders.
GrayImage median_filter(const GrayImage& img, int radius = 1);

/// Affine stretch to [0, 1]; a constant image maps to all zeros.
GrayImage normalize_linear(const GrayImage& img);

/// Explicit mode crops the rectangle. Auto mode crops the bounding box of the
/// largest 4-connected component of pixels >= threshold (ties go to the
/// component found first in row-major scan order).
GrayImage extract_roi(const GrayImage& img, const RoiSpec& spec);

/// Nearest-neighbour resampling to the requested size.
GrayImage resize_nearest(const GrayImage& img, int width, int height);

struct PreprocessOptions {
  int median_radius = 1;
  RoiSpec roi = RoiSpec::automatic();
};

/// grayscale -> median filter -> linear normalization -> ROI.
GrayImage preprocess(const Raster& raster, const PreprocessOptions& options);

// Image files. PNG is decoded with libpng; PGM (P2/P5) is handled natively.
Raster read_raster(const std::filesystem::path& path);
Raster read_png(const std::filesystem::path& path);
Raster read_pgm(const std::filesystem::path& path);
GrayImage read_gray(const std::filesystem::path& path);

/// Writes a binary PGM; 16-bit when max_value > 255.
void write_pgm(const std::filesystem::path& path, const GrayImage& img,
               std::uint32_t max_value = 65535);

}  // namespace smc
