#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "smc/error.hpp"
#include "smc/pipeline.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

// White noise blended with its 3x3 box average, each part at unit variance.
std::vector<double> correlated_field(Rng& rng, int size, double correlation) {
  const auto n = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
  std::vector<double> white(n), base(n), field(n);
  for (double& v : white) v = rng.normal();
  for (double& v : base) v = rng.normal();
  const double rho = std::clamp(correlation, 0.0, 1.0);
  const double keep = std::sqrt(1.0 - rho * rho);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double sum = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = std::clamp(y + dy, 0, size - 1);
          const int xx = std::clamp(x + dx, 0, size - 1);
          sum += base[static_cast<std::size_t>(yy * size + xx)];
        }
      }
      const auto i = static_cast<std::size_t>(y * size + x);
      field[i] = keep * white[i] + rho * (sum / 3.0);
    }
  }
  return field;
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

GrayImage phantom(const SyntheticSpec& spec, const ClassTexture& tex, std::uint64_t seed) {
  Rng rng(seed);
  const int s = spec.image_size;
  const double half = s / 2.0;
  const double nu = spec.nuisance;

  const double cx = half + nu * 0.12 * s * rng.uniform(-1.0, 1.0);
  const double cy = half + nu * 0.12 * s * rng.uniform(-1.0, 1.0);
  const double rx = 0.4 * s * (1.0 + 0.2 * nu * rng.uniform(-1.0, 1.0));
  const double ry = 0.4 * s * (1.0 + 0.2 * nu * rng.uniform(-1.0, 1.0));
  const double blob_level = 0.35 * (1.0 + 0.3 * nu * rng.uniform(-1.0, 1.0));
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  const double ramp = 0.25 * nu * rng.uniform(-1.0, 1.0);
  const double spot_x = s * rng.uniform(0.1, 0.9);
  const double spot_y = s * rng.uniform(0.1, 0.9);
  const double spot_r = 1.0 + 0.1 * s * rng.uniform();
  const double spot_level = 0.3 * nu * rng.uniform();

  const int r0 = s / 4;
  const int r1 = s - s / 4;
  const int region = r1 - r0;
  const std::vector<double> field = correlated_field(rng, region, tex.correlation);

  std::vector<double> px(static_cast<std::size_t>(s) * static_cast<std::size_t>(s));
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const double ex = (x + 0.5 - cx) / rx;
      const double ey = (y + 0.5 - cy) / ry;
      const double edge = (1.0 - std::sqrt(ex * ex + ey * ey)) * std::min(rx, ry);
      double v = 0.15 + blob_level * logistic(edge);
      v += ramp * (((x + 0.5 - half) * std::cos(theta) + (y + 0.5 - half) * std::sin(theta)) / s);
      const double sd = std::hypot(x + 0.5 - spot_x, y + 0.5 - spot_y);
      v += spot_level * logistic((spot_r - sd) * 2.0);
      if (x >= r0 && x < r1 && y >= r0 && y < r1) {
        const double t = field[static_cast<std::size_t>((y - r0) * region + (x - r0))];
        const double g = tex.gradient * ((y - r0 + 0.5) / region - 0.5);
        v += tex.contrast * (t + g);
      }
      v += spec.noise * rng.normal();
      px[static_cast<std::size_t>(y * s + x)] = std::clamp(v, 0.0, 1.0);
    }
  }
  return GrayImage(s, s, std::move(px));
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  require(spec.n_per_class >= 1, "n_per_class must be at least 1");
  require(spec.image_size >= 7, "image_size must be at least 7");
  require(spec.classes.size() >= 2, "synthetic corpus needs at least two classes");
  require(spec.nuisance >= 0.0 && spec.noise >= 0.0, "nuisance and noise must be non-negative");
  for (const ClassTexture& t : spec.classes) {
    require(std::isfinite(t.contrast) && std::isfinite(t.correlation) && std::isfinite(t.gradient),
            "class texture parameters must be finite");
  }

  SyntheticCorpus corpus;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    for (int i = 0; i < spec.n_per_class; ++i) {
      const std::uint64_t seed =
          derive_seed(spec.seed, {"image", std::to_string(c), std::to_string(i)});
      corpus.images.push_back(phantom(spec, spec.classes[c], seed));
      corpus.labels.push_back(static_cast<int>(c));
      char id[48];
      std::snprintf(id, sizeof id, "syn_c%zu_%04d", c, i);
      corpus.sample_ids.emplace_back(id);
    }
  }
  return corpus;
}

}  // namespace smc
