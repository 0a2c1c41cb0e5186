#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smc/imaging.hpp"

namespace smc {

/// Gray levels binned to [0, levels - 1].
struct QuantizedImage {
  int width = 0;
  int height = 0;
  int levels = 16;
  std::vector<int> bins;

  int operator()(int x, int y) const {
    return bins[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
};

/// Normalized gray-level co-occurrence matrix, row-major levels x levels.
struct Glcm {
  int levels = 0;
  std::vector<double> p;

  double operator()(int i, int j) const {
    return p[static_cast<std::size_t>(i) * static_cast<std::size_t>(levels) +
             static_cast<std::size_t>(j)];
  }
};

struct Offset {
  int dy = 0;
  int dx = 0;
  bool operator==(const Offset&) const = default;
};

struct GlcmFeatures {
  double contrast = 0.0;
  double homogeneity = 0.0;
  double energy = 0.0;
  double correlation = 0.0;
};

struct MomentFeatures {
  double sigma = 0.0;
  double skew = 0.0;
  double kurtosis = 0.0;  // excess
};

struct WindowGrid {
  int rows = 0;
  int cols = 0;
  int count() const { return rows * cols; }
  bool operator==(const WindowGrid&) const = default;
};

inline constexpr std::array<const char*, 7> kViewNames = {
    "contrast", "homogeneity", "energy", "correlation", "sigma", "skew", "kurtosis"};

struct ViewConfig {
  int window = 7;
  int stride = 1;
  int levels = 16;
  /// Distance-1 directions, pooled and symmetrized into one matrix.
  std::vector<Offset> offsets = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
};

/// One feature type over all samples: n_samples x d.
struct FeatureView {
  std::string name;
  Eigen::MatrixXd matrix;
};

/// M named views over the same n samples.
class MultiViewDataset {
 public:
  MultiViewDataset() = default;
  MultiViewDataset(std::vector<FeatureView> views, std::vector<std::string> sample_ids,
                   std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t sample_count() const noexcept { return sample_ids_.size(); }
  std::size_t view_count() const noexcept { return views_.size(); }
  const std::vector<FeatureView>& views() const noexcept { return views_; }
  const FeatureView& view(std::size_t v) const { return views_.at(v); }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }
  bool labeled() const noexcept { return labels_.has_value(); }
  /// Number of classes C; zero when unlabeled.
  int class_count() const noexcept { return class_count_; }

 private:
  std::vector<FeatureView> views_;
  std::vector<std::string> sample_ids_;
  std::optional<std::vector<int>> labels_;
  int class_count_ = 0;
};

QuantizedImage quantize(const GrayImage& img, int levels = 16);

/// Window positions for a sliding window; (0, 0) when the window does not fit.
WindowGrid window_grid(int width, int height, int size, int stride);

/// Co-occurrence counts over all in-bounds pairs for all offsets, normalized to
/// sum 1. When symmetric, each pair is counted in both orders.
Glcm glcm(const QuantizedImage& window, std::span<const Offset> offsets, bool symmetric = true);

/// Co-occurrence matrix of the size x size window at (x0, y0) without copying.
Glcm glcm(const QuantizedImage& img, int x0, int y0, int size, std::span<const Offset> offsets,
          bool symmetric = true);

/// Correlation is 0 when either marginal standard deviation vanishes.
GlcmFeatures glcm_features(const Glcm& g);

/// Population moments; skew and kurtosis are 0 for a constant sample.
MomentFeatures moment_features(std::span<const double> values);
MomentFeatures moment_features(const GrayImage& window);

/// The seven per-window feature maps in kViewNames order, each flattened in
/// row-major window order.
std::array<std::vector<double>, 7> extract_views(const GrayImage& img, const ViewConfig& config);

/// Builds the seven-view dataset. Images of differing size are resampled
/// (nearest neighbour) to the smallest width and height in the corpus.
MultiViewDataset build_dataset(const std::vector<GrayImage>& images,
                               const std::optional<std::vector<int>>& labels,
                               const ViewConfig& config,
                               std::vector<std::string> sample_ids = {});

}  // namespace smc
