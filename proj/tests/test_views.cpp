#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "smc/error.hpp"
#include "smc/random.hpp"
#include "smc/views.hpp"

using namespace smc;

namespace {

QuantizedImage make_quantized(int w, int h, int levels, std::vector<int> bins) {
  QuantizedImage q;
  q.width = w;
  q.height = h;
  q.levels = levels;
  q.bins = std::move(bins);
  return q;
}

QuantizedImage random_quantized(Rng& rng, int w, int h, int levels) {
  std::vector<int> bins(static_cast<std::size_t>(w * h));
  for (int& b : bins) b = static_cast<int>(rng.index(static_cast<std::size_t>(levels)));
  return make_quantized(w, h, levels, std::move(bins));
}

GrayImage random_image(Rng& rng, int w, int h) {
  std::vector<double> px(static_cast<std::size_t>(w * h));
  for (double& v : px) v = rng.uniform();
  return GrayImage(w, h, std::move(px));
}

const std::vector<Offset> kDefaultOffsets = ViewConfig{}.offsets;

}  // namespace

TEST(Quantize, Edges) {
  const GrayImage img(3, 1, std::vector<double>{0.0, 1.0, 0.5});
  const QuantizedImage q = quantize(img, 16);
  EXPECT_EQ(q(0, 0), 0);
  EXPECT_EQ(q(1, 0), 15);
  EXPECT_EQ(q(2, 0), 8);
  EXPECT_THROW(quantize(img, 1), Error);
}

TEST(Quantize, BinsInRange) {
  Rng rng(1);
  for (int levels : {2, 3, 16, 64}) {
    const QuantizedImage q = quantize(random_image(rng, 9, 9), levels);
    for (int b : q.bins) {
      EXPECT_GE(b, 0);
      EXPECT_LT(b, levels);
    }
  }
}

TEST(WindowGrid, Examples) {
  EXPECT_EQ(window_grid(10, 10, 7, 1), (WindowGrid{4, 4}));
  EXPECT_EQ(window_grid(10, 10, 7, 1).count(), 16);
  EXPECT_EQ(window_grid(7, 7, 7, 1), (WindowGrid{1, 1}));
  EXPECT_EQ(window_grid(6, 6, 7, 1), (WindowGrid{0, 0}));
  EXPECT_EQ(window_grid(12, 9, 3, 2), (WindowGrid{4, 5}));
}

TEST(Glcm, ConstantWindowIsSingleDiagonalEntry) {
  const QuantizedImage w = make_quantized(3, 3, 4, std::vector<int>(9, 2));
  const Glcm g = glcm(w, kDefaultOffsets);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(g(i, j), (i == 2 && j == 2) ? 1.0 : 0.0);
  }
  const GlcmFeatures f = glcm_features(g);
  EXPECT_EQ(f.contrast, 0.0);
  EXPECT_EQ(f.homogeneity, 1.0);
  EXPECT_EQ(f.energy, 1.0);
  EXPECT_EQ(f.correlation, 0.0);
}

TEST(Glcm, CheckerboardHorizontalOnly) {
  const QuantizedImage w = make_quantized(2, 2, 2, {0, 1, 1, 0});
  const std::vector<Offset> horizontal = {{0, 1}};
  const Glcm g = glcm(w, horizontal, false);
  EXPECT_EQ(g(0, 1), 0.5);
  EXPECT_EQ(g(1, 0), 0.5);
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(1, 1), 0.0);
  const GlcmFeatures f = glcm_features(g);
  EXPECT_EQ(f.contrast, 1.0);
  EXPECT_EQ(f.homogeneity, 0.5);
  EXPECT_EQ(f.energy, 0.5);
  EXPECT_EQ(f.correlation, -1.0);
}

TEST(Glcm, UniformTwoLevelFeatures) {
  Glcm g;
  g.levels = 2;
  g.p = {0.25, 0.25, 0.25, 0.25};
  const GlcmFeatures f = glcm_features(g);
  EXPECT_DOUBLE_EQ(f.contrast, 0.5);
  EXPECT_DOUBLE_EQ(f.homogeneity, 0.75);
  EXPECT_DOUBLE_EQ(f.energy, 0.25);
  EXPECT_NEAR(f.correlation, 0.0, 1e-15);
}

TEST(Glcm, SinglePixelIsEmpty) {
  const QuantizedImage w = make_quantized(1, 1, 16, {3});
  const std::vector<Offset> horizontal = {{0, 1}};
  try {
    glcm(w, horizontal);
    FAIL() << "expected EmptyGlcm";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGlcm);
  }
}

TEST(Glcm, MatchesPairEnumerationOracle) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 2 + static_cast<int>(rng.index(6));
    const int h = 2 + static_cast<int>(rng.index(6));
    const int levels = 2 + static_cast<int>(rng.index(15));
    const bool symmetric = rng.index(2) == 0;
    const QuantizedImage q = random_quantized(rng, w, h, levels);
    const Glcm g = glcm(q, kDefaultOffsets, symmetric);
    const oracle::GlcmCounts counts = oracle::glcm_counts(q, kDefaultOffsets, symmetric);
    EXPECT_EQ(g.p, oracle::glcm_probabilities(counts));
  }
}

TEST(Glcm, InvariantsOnRandomWindows) {
  Rng rng(78);
  for (int trial = 0; trial < 100; ++trial) {
    const QuantizedImage q = random_quantized(rng, 7, 7, 16);
    const Glcm g = glcm(q, kDefaultOffsets);
    double sum = 0.0;
    for (double p : g.p) {
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) EXPECT_EQ(g(i, j), g(j, i));
    }
    const GlcmFeatures f = glcm_features(g);
    EXPECT_GE(f.contrast, 0.0);
    EXPECT_GT(f.energy, 0.0);
    EXPECT_LE(f.energy, 1.0);
    EXPECT_GT(f.homogeneity, 0.0);
    EXPECT_LE(f.homogeneity, 1.0);
    EXPECT_GE(f.correlation, -1.0);
    EXPECT_LE(f.correlation, 1.0);
  }
}

TEST(Glcm, FeaturesInvariantUnderPairTransposition) {
  // Reversing every offset transposes the unsymmetrized matrix; after
  // symmetrization both must give the same features.
  Rng rng(79);
  std::vector<Offset> reversed;
  for (const Offset& o : kDefaultOffsets) reversed.push_back({-o.dy, -o.dx});
  for (int trial = 0; trial < 50; ++trial) {
    const QuantizedImage q = random_quantized(rng, 6, 5, 8);
    const GlcmFeatures a = glcm_features(glcm(q, kDefaultOffsets));
    const GlcmFeatures b = glcm_features(glcm(q, reversed));
    EXPECT_EQ(a.contrast, b.contrast);
    EXPECT_EQ(a.homogeneity, b.homogeneity);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.correlation, b.correlation);
  }
}

TEST(Glcm, SubWindowOverloadMatchesCopy) {
  Rng rng(80);
  const QuantizedImage img = random_quantized(rng, 12, 10, 16);
  for (int y0 = 0; y0 + 7 <= 10; ++y0) {
    for (int x0 = 0; x0 + 7 <= 12; ++x0) {
      std::vector<int> bins;
      for (int y = y0; y < y0 + 7; ++y) {
        for (int x = x0; x < x0 + 7; ++x) bins.push_back(img(x, y));
      }
      const QuantizedImage window = make_quantized(7, 7, 16, bins);
      EXPECT_EQ(glcm(img, x0, y0, 7, kDefaultOffsets).p, glcm(window, kDefaultOffsets).p);
    }
  }
}

TEST(Moments, Examples) {
  const std::vector<double> constant(9, 0.3);
  const MomentFeatures c = moment_features(constant);
  EXPECT_EQ(c.sigma, 0.0);
  EXPECT_EQ(c.skew, 0.0);
  EXPECT_EQ(c.kurtosis, 0.0);

  const std::vector<double> two_point = {0, 0, 1, 1};
  const MomentFeatures t = moment_features(two_point);
  EXPECT_DOUBLE_EQ(t.sigma, 0.5);
  EXPECT_DOUBLE_EQ(t.skew, 0.0);
  EXPECT_DOUBLE_EQ(t.kurtosis, -2.0);

  const std::vector<double> ramp = {1, 2, 3, 4};
  const MomentFeatures r = moment_features(ramp);
  EXPECT_DOUBLE_EQ(r.sigma, std::sqrt(1.25));
  EXPECT_NEAR(r.skew, 0.0, 1e-15);
  EXPECT_NEAR(r.kurtosis, -1.36, 1e-12);
}

TEST(Moments, ShiftAndScaleProperties) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(49);
    for (double& x : v) x = rng.uniform();
    const double shift = rng.uniform(-3.0, 3.0);
    const double scale = rng.uniform(0.1, 5.0);
    std::vector<double> shifted = v, scaled = v;
    for (double& x : shifted) x += shift;
    for (double& x : scaled) x *= scale;
    const MomentFeatures a = moment_features(v);
    const MomentFeatures b = moment_features(shifted);
    const MomentFeatures c = moment_features(scaled);
    EXPECT_NEAR(a.sigma, b.sigma, 1e-12);
    EXPECT_NEAR(a.skew, b.skew, 1e-9);
    EXPECT_NEAR(a.kurtosis, b.kurtosis, 1e-9);
    EXPECT_NEAR(c.sigma, scale * a.sigma, 1e-12);
    EXPECT_NEAR(c.skew, a.skew, 1e-9);
    EXPECT_NEAR(c.kurtosis, a.kurtosis, 1e-9);
  }
}

TEST(ExtractViews, SingleWindow) {
  Rng rng(6);
  const auto views = extract_views(random_image(rng, 7, 7), ViewConfig{});
  for (const auto& v : views) EXPECT_EQ(v.size(), 1u);
}

TEST(ExtractViews, ConstantImage) {
  const auto views = extract_views(GrayImage(10, 10, 0.4), ViewConfig{});
  for (const auto& v : views) ASSERT_EQ(v.size(), 16u);
  for (double c : views[0]) EXPECT_EQ(c, 0.0);  // contrast
  for (double e : views[2]) EXPECT_EQ(e, 1.0);  // energy
}

TEST(ExtractViews, RowMajorWindowOrder) {
  Rng rng(7);
  const GrayImage img = random_image(rng, 10, 9);
  const ViewConfig config;
  const auto views = extract_views(img, config);
  const QuantizedImage q = quantize(img, config.levels);
  ASSERT_EQ(views[0].size(), 12u);  // 3 rows x 4 cols
  std::size_t k = 0;
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x, ++k) {
      const GlcmFeatures f = glcm_features(glcm(q, x, y, 7, config.offsets));
      EXPECT_EQ(views[0][k], f.contrast);
      EXPECT_EQ(views[3][k], f.correlation);
      const MomentFeatures m = moment_features(img.crop(x, y, 7, 7));
      EXPECT_EQ(views[4][k], m.sigma);
      EXPECT_EQ(views[6][k], m.kurtosis);
    }
  }
}

TEST(ExtractViews, LengthMatchesGridForRandomSizes) {
  Rng rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    ViewConfig config;
    config.window = 2 + static_cast<int>(rng.index(6));
    config.stride = 1 + static_cast<int>(rng.index(3));
    const int w = config.window + static_cast<int>(rng.index(8));
    const int h = config.window + static_cast<int>(rng.index(8));
    const auto views = extract_views(random_image(rng, w, h), config);
    const auto expected = static_cast<std::size_t>(window_grid(w, h, config.window, config.stride).count());
    for (const auto& v : views) EXPECT_EQ(v.size(), expected);
  }
}

TEST(ExtractViews, TooSmallImageIsInvalid) {
  EXPECT_THROW(extract_views(GrayImage(6, 6), ViewConfig{}), Error);
}

TEST(BuildDataset, Construction) {
  Rng rng(9);
  std::vector<GrayImage> images;
  for (int i = 0; i < 3; ++i) images.push_back(random_image(rng, 9, 9));
  const MultiViewDataset unlabeled = build_dataset(images, std::nullopt, ViewConfig{});
  EXPECT_EQ(unlabeled.sample_count(), 3u);
  EXPECT_EQ(unlabeled.view_count(), 7u);
  EXPECT_FALSE(unlabeled.labeled());
  for (std::size_t v = 0; v < 7; ++v) {
    EXPECT_EQ(unlabeled.view(v).name, kViewNames[v]);
    EXPECT_EQ(unlabeled.view(v).matrix.rows(), 3);
    EXPECT_EQ(unlabeled.view(v).matrix.cols(), 9);
  }
  const MultiViewDataset labeled = build_dataset(images, std::vector<int>{0, 1, 2}, ViewConfig{});
  EXPECT_TRUE(labeled.labeled());
  EXPECT_EQ(labeled.class_count(), 3);
  EXPECT_THROW(build_dataset(images, std::vector<int>{0, 1}, ViewConfig{}), Error);
  EXPECT_THROW(build_dataset({}, std::nullopt, ViewConfig{}), Error);
}

TEST(BuildDataset, ResamplesToSmallestSize) {
  Rng rng(10);
  const std::vector<GrayImage> images = {random_image(rng, 12, 10), random_image(rng, 9, 11)};
  const MultiViewDataset d = build_dataset(images, std::nullopt, ViewConfig{});
  EXPECT_EQ(d.view(0).matrix.cols(), window_grid(9, 10, 7, 1).count());
}

TEST(MultiViewDataset, Invariants) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 2);
  EXPECT_THROW(MultiViewDataset({{"x", a}, {"x", a}}, {"a", "b", "c"}), Error);
  EXPECT_THROW(MultiViewDataset({{"x", Eigen::MatrixXd::Zero(2, 2)}}, {"a", "b", "c"}), Error);
  EXPECT_THROW(MultiViewDataset({{"x", a}}, {"a", "b", "c"}, std::vector<int>{0, 2, 2}), Error);
  Eigen::MatrixXd bad = a;
  bad(0, 0) = std::nan("");
  EXPECT_THROW(MultiViewDataset({{"x", bad}}, {"a", "b", "c"}), Error);
}
