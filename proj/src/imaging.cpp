#include "smc/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>

#include "smc/error.hpp"

namespace smc {

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)),
                                    fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require(width >= 1 && height >= 1, "image dimensions must be positive");
  require(data_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
          "image data length does not match width*height");
  for (double v : data_) {
    require(v >= 0.0 && v <= 1.0, "image intensities must lie in [0, 1]");
  }
}

double GrayImage::at_clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y)];
}

GrayImage GrayImage::crop(int x0, int y0, int w, int h) const {
  require(w >= 1 && h >= 1 && x0 >= 0 && y0 >= 0 && x0 + w <= width_ && y0 + h <= height_,
          "crop rectangle lies outside the image");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = y0; y < y0 + h; ++y) {
    const auto row = data_.begin() + static_cast<std::ptrdiff_t>(index(x0, y));
    out.insert(out.end(), row, row + w);
  }
  return GrayImage(w, h, std::move(out));
}

RoiSpec RoiSpec::automatic(double threshold) {
  require(threshold > 0.0 && threshold < 1.0, "auto ROI threshold must lie in (0, 1)");
  RoiSpec spec;
  spec.mode = Mode::Auto;
  spec.threshold = threshold;
  return spec;
}

RoiSpec RoiSpec::explicit_rect(RoiRect rect) {
  require(rect.width >= 1 && rect.height >= 1 && rect.x0 >= 0 && rect.y0 >= 0,
          "ROI rectangle must have non-negative origin and positive size");
  RoiSpec spec;
  spec.mode = Mode::Explicit;
  spec.rect = rect;
  return spec;
}

RoiSpec RoiSpec::parse(const std::string& text) {
  if (text.rfind("auto:", 0) == 0) {
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(text.substr(5), &used);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidInput, "malformed ROI spec: " + text);
    }
    require(used == text.size() - 5, "malformed ROI spec: " + text);
    return automatic(t);
  }
  if (text.rfind("rect:", 0) == 0) {
    RoiRect r;
    char tail = 0;
    const int got = std::sscanf(text.c_str() + 5, "%d,%d,%d,%d%c", &r.x0, &r.y0, &r.width,
                                &r.height, &tail);
    require(got == 4, "malformed ROI spec: " + text);
    return explicit_rect(r);
  }
  if (text == "auto") return automatic();
  fail(ErrorCode::InvalidInput, "ROI spec must be auto:<t> or rect:x0,y0,w,h, got " + text);
}

std::string RoiSpec::to_string() const {
  std::ostringstream os;
  if (mode == Mode::Auto) {
    os << "auto:" << threshold;
  } else {
    os << "rect:" << rect.x0 << ',' << rect.y0 << ',' << rect.width << ',' << rect.height;
  }
  return os.str();
}

GrayImage to_grayscale(const Raster& raster) {
  require(raster.width >= 1 && raster.height >= 1, "empty image");
  require(raster.channels >= 1 && raster.channels <= 4, "unsupported channel count");
  require(raster.max_value >= 1, "raster max value must be positive");
  const std::size_t pixels =
      static_cast<std::size_t>(raster.width) * static_cast<std::size_t>(raster.height);
  const auto channels = static_cast<std::size_t>(raster.channels);
  require(raster.samples.size() == pixels * channels, "raster sample count mismatch");

  const double scale = 1.0 / static_cast<double>(raster.max_value);
  std::vector<double> out(pixels);
  for (std::size_t p = 0; p < pixels; ++p) {
    const std::uint16_t* px = raster.samples.data() + p * channels;
    double v;
    if (channels <= 2) {
      v = px[0] * scale;
    } else {
      v = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) * scale;
    }
    out[p] = std::clamp(v, 0.0, 1.0);
  }
  return GrayImage(raster.width, raster.height, std::move(out));
}

GrayImage median_filter(const GrayImage& img, int radius) {
  require(radius >= 1, "median filter radius must be >= 1");
  require(!img.empty(), "median filter on empty image");
  const int side = 2 * radius + 1;
  std::vector<double> window(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);

  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      std::size_t k = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          window[k++] = img.at_clamped(x + dx, y + dy);
        }
      }
      std::nth_element(window.begin(), mid, window.end());
      out(x, y) = *mid;
    }
  }
  return out;
}

GrayImage normalize_linear(const GrayImage& img) {
  require(!img.empty(), "normalization of empty image");
  const auto [lo_it, hi_it] = std::minmax_element(img.data().begin(), img.data().end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (range <= 0.0) return GrayImage(img.width(), img.height(), 0.0);

  std::vector<double> out(img.data().size());
  std::transform(img.data().begin(), img.data().end(), out.begin(),
                 [&](double v) { return std::clamp((v - lo) / range, 0.0, 1.0); });
  return GrayImage(img.width(), img.height(), std::move(out));
}

namespace {

RoiRect largest_component_bbox(const GrayImage& img, double threshold) {
  const int w = img.width();
  const int h = img.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  auto flat = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };

  std::size_t best_size = 0;
  RoiRect best;
  std::queue<std::pair<int, int>> frontier;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (seen[flat(x, y)] || img(x, y) < threshold) continue;
      seen[flat(x, y)] = 1;
      frontier.emplace(x, y);
      std::size_t size = 0;
      int xmin = x, xmax = x, ymin = y, ymax = y;
      while (!frontier.empty()) {
        const auto [cx, cy] = frontier.front();
        frontier.pop();
        ++size;
        xmin = std::min(xmin, cx);
        xmax = std::max(xmax, cx);
        ymin = std::min(ymin, cy);
        ymax = std::max(ymax, cy);
        constexpr int kDx[4] = {1, -1, 0, 0};
        constexpr int kDy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + kDx[k];
          const int ny = cy + kDy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (seen[flat(nx, ny)] || img(nx, ny) < threshold) continue;
          seen[flat(nx, ny)] = 1;
          frontier.emplace(nx, ny);
        }
      }
      if (size > best_size) {
        best_size = size;
        best = RoiRect{xmin, ymin, xmax - xmin + 1, ymax - ymin + 1};
      }
    }
  }
  if (best_size == 0) {
    fail(ErrorCode::EmptyRoi, "no pixel reaches the ROI threshold");
  }
  return best;
}

}  // namespace

GrayImage extract_roi(const GrayImage& img, const RoiSpec& spec) {
  require(!img.empty(), "ROI extraction on empty image");
  if (spec.mode == RoiSpec::Mode::Explicit) {
    const RoiRect& r = spec.rect;
    require(r.x0 >= 0 && r.y0 >= 0 && r.width >= 1 && r.height >= 1 &&
                r.x0 + r.width <= img.width() && r.y0 + r.height <= img.height(),
            "explicit ROI rectangle lies outside the image");
    return img.crop(r.x0, r.y0, r.width, r.height);
  }
  require(spec.threshold > 0.0 && spec.threshold < 1.0, "auto ROI threshold must lie in (0, 1)");
  const RoiRect box = largest_component_bbox(img, spec.threshold);
  return img.crop(box.x0, box.y0, box.width, box.height);
}

GrayImage resize_nearest(const GrayImage& img, int width, int height) {
  require(!img.empty() && width >= 1 && height >= 1, "invalid resize request");
  if (width == img.width() && height == img.height()) return img;
  GrayImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(img.height() - 1,
                            static_cast<int>((static_cast<double>(y) + 0.5) * img.height() / height));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(img.width() - 1,
                              static_cast<int>((static_cast<double>(x) + 0.5) * img.width() / width));
      out(x, y) = img(sx, sy);
    }
  }
  return out;
}

GrayImage preprocess(const Raster& raster, const PreprocessOptions& options) {
  GrayImage img = to_grayscale(raster);
  img = median_filter(img, options.median_radius);
  img = normalize_linear(img);
  return extract_roi(img, options.roi);
}

}  // namespace smc
