#include "smc/views.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "smc/error.hpp"

namespace smc {

MultiViewDataset::MultiViewDataset(std::vector<FeatureView> views,
                                   std::vector<std::string> sample_ids,
                                   std::optional<std::vector<int>> labels)
    : views_(std::move(views)), sample_ids_(std::move(sample_ids)), labels_(std::move(labels)) {
  const auto n = static_cast<Eigen::Index>(sample_ids_.size());
  require(n >= 1, "dataset must contain at least one sample");
  std::set<std::string> names;
  for (const FeatureView& v : views_) {
    require(v.matrix.rows() == n, "view '" + v.name + "' does not have one row per sample");
    require(names.insert(v.name).second, "duplicate view name '" + v.name + "'");
    require(v.matrix.allFinite(), "view '" + v.name + "' contains non-finite values");
  }
  if (labels_) {
    require(labels_->size() == sample_ids_.size(), "label count does not match sample count");
    int max_label = -1;
    for (int y : *labels_) {
      require(y >= 0, "class labels must be non-negative");
      max_label = std::max(max_label, y);
    }
    std::vector<int> seen(static_cast<std::size_t>(max_label + 1), 0);
    for (int y : *labels_) seen[static_cast<std::size_t>(y)] = 1;
    require(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }),
            "every class in [0, C-1] needs at least one sample");
    class_count_ = max_label + 1;
  }
}

QuantizedImage quantize(const GrayImage& img, int levels) {
  require(levels >= 2, "quantization needs at least 2 levels");
  require(!img.empty(), "quantization of empty image");
  QuantizedImage q;
  q.width = img.width();
  q.height = img.height();
  q.levels = levels;
  q.bins.resize(img.data().size());
  std::transform(img.data().begin(), img.data().end(), q.bins.begin(), [levels](double v) {
    const auto bin = static_cast<int>(std::floor(v * levels));
    return std::clamp(bin, 0, levels - 1);
  });
  return q;
}

WindowGrid window_grid(int width, int height, int size, int stride) {
  require(size >= 1 && stride >= 1, "window size and stride must be >= 1");
  if (width < size || height < size) return {};
  return {(height - size) / stride + 1, (width - size) / stride + 1};
}

namespace {

// Counts co-occurrences inside the rectangle [x0, x0+w) x [y0, y0+h).
Glcm glcm_in_rect(const QuantizedImage& img, int x0, int y0, int w, int h,
                  std::span<const Offset> offsets, bool symmetric) {
  require(img.levels >= 2, "quantized image needs at least 2 levels");
  require(w >= 1 && h >= 1, "GLCM of empty window");
  require(!offsets.empty(), "GLCM needs at least one offset");

  const auto levels = static_cast<std::size_t>(img.levels);
  std::vector<std::uint64_t> counts(levels * levels, 0);
  std::uint64_t total = 0;
  for (const Offset& off : offsets) {
    for (int y = y0; y < y0 + h; ++y) {
      const int ny = y + off.dy;
      if (ny < y0 || ny >= y0 + h) continue;
      for (int x = x0; x < x0 + w; ++x) {
        const int nx = x + off.dx;
        if (nx < x0 || nx >= x0 + w) continue;
        const auto a = static_cast<std::size_t>(img(x, y));
        const auto b = static_cast<std::size_t>(img(nx, ny));
        ++counts[a * levels + b];
        ++total;
        if (symmetric) {
          ++counts[b * levels + a];
          ++total;
        }
      }
    }
  }
  if (total == 0) fail(ErrorCode::EmptyGlcm, "no in-bounds pixel pair for any offset");

  Glcm g;
  g.levels = img.levels;
  g.p.resize(counts.size());
  const auto denom = static_cast<double>(total);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    g.p[k] = static_cast<double>(counts[k]) / denom;
  }
  return g;
}

}  // namespace

Glcm glcm(const QuantizedImage& window, std::span<const Offset> offsets, bool symmetric) {
  return glcm_in_rect(window, 0, 0, window.width, window.height, offsets, symmetric);
}

Glcm glcm(const QuantizedImage& img, int x0, int y0, int size, std::span<const Offset> offsets,
          bool symmetric) {
  require(size >= 1 && x0 >= 0 && y0 >= 0 && x0 + size <= img.width && y0 + size <= img.height,
          "GLCM window lies outside the image");
  return glcm_in_rect(img, x0, y0, size, size, offsets, symmetric);
}

GlcmFeatures glcm_features(const Glcm& g) {
  const int L = g.levels;
  GlcmFeatures f;
  double mu_i = 0.0, mu_j = 0.0;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      const double p = g(i, j);
      const int diff = i - j;
      f.contrast += static_cast<double>(diff * diff) * p;
      f.homogeneity += p / (1.0 + std::abs(diff));
      f.energy += p * p;
      mu_i += i * p;
      mu_j += j * p;
    }
  }
  double var_i = 0.0, var_j = 0.0, cov = 0.0;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      const double p = g(i, j);
      var_i += (i - mu_i) * (i - mu_i) * p;
      var_j += (j - mu_j) * (j - mu_j) * p;
      cov += (i - mu_i) * (j - mu_j) * p;
    }
  }
  const double scale = std::sqrt(var_i) * std::sqrt(var_j);
  f.correlation = scale > 1e-12 ? std::clamp(cov / scale, -1.0, 1.0) : 0.0;
  return f;
}

MomentFeatures moment_features(std::span<const double> values) {
  require(!values.empty(), "moments of an empty window");
  const double first = values.front();
  if (std::all_of(values.begin(), values.end(), [first](double v) { return v == first; })) {
    return {};
  }
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  MomentFeatures out;
  out.sigma = std::sqrt(m2);
  if (out.sigma == 0.0) return {};
  out.skew = m3 / (out.sigma * out.sigma * out.sigma);
  out.kurtosis = m4 / (m2 * m2) - 3.0;
  return out;
}

MomentFeatures moment_features(const GrayImage& window) {
  return moment_features(std::span<const double>(window.data()));
}

std::array<std::vector<double>, 7> extract_views(const GrayImage& img, const ViewConfig& config) {
  require(config.window >= 1 && config.stride >= 1, "window size and stride must be >= 1");
  require(!img.empty() && img.width() >= config.window && img.height() >= config.window,
          "image is smaller than the feature window");
  const WindowGrid grid = window_grid(img.width(), img.height(), config.window, config.stride);
  const QuantizedImage q = quantize(img, config.levels);

  std::array<std::vector<double>, 7> out;
  for (auto& v : out) v.reserve(static_cast<std::size_t>(grid.count()));

  const auto side = static_cast<std::size_t>(config.window);
  std::vector<double> raw(side * side);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const int x0 = c * config.stride;
      const int y0 = r * config.stride;
      const GlcmFeatures tex = glcm_features(glcm(q, x0, y0, config.window, config.offsets));
      std::size_t k = 0;
      for (int y = y0; y < y0 + config.window; ++y) {
        for (int x = x0; x < x0 + config.window; ++x) raw[k++] = img(x, y);
      }
      const MomentFeatures mom = moment_features(raw);
      out[0].push_back(tex.contrast);
      out[1].push_back(tex.homogeneity);
      out[2].push_back(tex.energy);
      out[3].push_back(tex.correlation);
      out[4].push_back(mom.sigma);
      out[5].push_back(mom.skew);
      out[6].push_back(mom.kurtosis);
    }
  }
  return out;
}

MultiViewDataset build_dataset(const std::vector<GrayImage>& images,
                               const std::optional<std::vector<int>>& labels,
                               const ViewConfig& config, std::vector<std::string> sample_ids) {
  require(!images.empty(), "empty image corpus");
  if (labels) require(labels->size() == images.size(), "label count does not match image count");
  if (sample_ids.empty()) {
    sample_ids.reserve(images.size());
    char buf[32];
    for (std::size_t i = 0; i < images.size(); ++i) {
      std::snprintf(buf, sizeof buf, "sample_%04zu", i);
      sample_ids.emplace_back(buf);
    }
  }
  require(sample_ids.size() == images.size(), "sample id count does not match image count");

  int width = images.front().width();
  int height = images.front().height();
  for (const GrayImage& img : images) {
    require(!img.empty(), "empty image in corpus");
    width = std::min(width, img.width());
    height = std::min(height, img.height());
  }
  const WindowGrid grid = window_grid(width, height, config.window, config.stride);
  require(grid.count() > 0, "corpus images are smaller than the feature window");

  const auto n = static_cast<Eigen::Index>(images.size());
  std::vector<FeatureView> views(kViewNames.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    views[v].name = kViewNames[v];
    views[v].matrix.resize(n, grid.count());
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const GrayImage& src = images[static_cast<std::size_t>(i)];
    const auto maps = extract_views(resize_nearest(src, width, height), config);
    for (std::size_t v = 0; v < views.size(); ++v) {
      views[v].matrix.row(i) = Eigen::Map<const Eigen::RowVectorXd>(
          maps[v].data(), static_cast<Eigen::Index>(maps[v].size()));
    }
  }
  return MultiViewDataset(std::move(views), std::move(sample_ids), labels);
}

}  // namespace smc
