#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "smc/views.hpp"

namespace smc::oracle {

// ------------------------------------------------------------------ GLCM

struct GlcmCounts {
  int levels = 0;
  std::vector<std::int64_t> counts;  // row-major levels x levels
  std::int64_t total = 0;
};

/// Enumerates every ordered pixel pair (p, q) of the window and counts it
/// once per offset equal to q - p.
inline GlcmCounts glcm_counts(const QuantizedImage& w, const std::vector<Offset>& offsets, bool symmetric) {
  GlcmCounts g;
  g.levels = w.levels;
  g.counts.assign(static_cast<std::size_t>(w.levels * w.levels), 0);
  const int n = w.width * w.height;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const int py = p / w.width, px = p % w.width;
      const int qy = q / w.width, qx = q % w.width;
      for (const Offset& o : offsets) {
        if (qy - py != o.dy || qx - px != o.dx) continue;
        const int a = w(px, py), b = w(qx, qy);
        ++g.counts[static_cast<std::size_t>(a * w.levels + b)];
        ++g.total;
        if (symmetric) {
          ++g.counts[static_cast<std::size_t>(b * w.levels + a)];
          ++g.total;
        }
      }
    }
  }
  return g;
}

inline std::vector<double> glcm_probabilities(const GlcmCounts& g) {
  std::vector<double> p(g.counts.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = static_cast<double>(g.counts[k]) / static_cast<double>(g.total);
  return p;
}

/// Textbook sums over (i, j) in row-major order.
inline GlcmFeatures glcm_features(int levels, const std::vector<double>& p) {
  auto at = [&](int i, int j) { return p[static_cast<std::size_t>(i * levels + j)]; };
  GlcmFeatures f;
  double mu_i = 0.0, mu_j = 0.0;
  for (int i = 0; i < levels; ++i) {
    for (int j = 0; j < levels; ++j) {
      f.contrast += static_cast<double>((i - j) * (i - j)) * at(i, j);
      f.homogeneity += at(i, j) / (1.0 + std::abs(i - j));
      f.energy += at(i, j) * at(i, j);
      mu_i += i * at(i, j);
      mu_j += j * at(i, j);
    }
  }
  double vi = 0.0, vj = 0.0, cov = 0.0;
  for (int i = 0; i < levels; ++i) {
    for (int j = 0; j < levels; ++j) {
      vi += (i - mu_i) * (i - mu_i) * at(i, j);
      vj += (j - mu_j) * (j - mu_j) * at(i, j);
      cov += (i - mu_i) * (j - mu_j) * at(i, j);
    }
  }
  const double s = std::sqrt(vi) * std::sqrt(vj);
  f.correlation = s > 1e-12 ? std::clamp(cov / s, -1.0, 1.0) : 0.0;
  return f;
}

// --------------------------------------------------------------- metrics

struct PairCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Direct enumeration of all unordered sample pairs.
inline PairCounts pair_counts(const std::vector<int>& truth, const std::vector<int>& pred) {
  PairCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = i + 1; j < truth.size(); ++j) {
      const bool same_t = truth[i] == truth[j];
      const bool same_p = pred[i] == pred[j];
      if (same_t && same_p) ++c.tp;
      else if (!same_t && same_p) ++c.fp;
      else if (same_t && !same_p) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

/// Largest number of samples matched by any injective cluster -> class map,
/// by trying every permutation.
inline std::int64_t best_matching(const std::vector<int>& truth, const std::vector<int>& pred) {
  const int classes = *std::max_element(truth.begin(), truth.end()) + 1;
  const int clusters = *std::max_element(pred.begin(), pred.end()) + 1;
  const int m = std::max(classes, clusters);
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = 0;
  do {
    std::int64_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += perm[static_cast<std::size_t>(pred[i])] == truth[i] ? 1 : 0;
    best = std::max(best, hit);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Exact rationals as (numerator, denominator) pairs of integers.
struct Fraction {
  __extension__ __int128 num = 0;
  __extension__ __int128 den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Fraction accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
  return {best_matching(truth, pred), static_cast<std::int64_t>(truth.size())};
}

inline Fraction rand_index(const PairCounts& c) { return {c.tp + c.tn, c.tp + c.fp + c.fn + c.tn}; }

/// ARI from the pair form of the expected index:
/// (RI - E[RI]) / (max RI - E[RI]) with everything scaled by N^2, N = C(n, 2).
inline Fraction ari(const PairCounts& c) {
  __extension__ using i128 = __int128;
  const i128 N = c.tp + c.fp + c.fn + c.tn;
  const i128 same_t = c.tp + c.fn;
  const i128 same_p = c.tp + c.fp;
  const i128 expected = same_t * same_p;                 // N * E[tp]
  const i128 num = c.tp * N - expected;
  const i128 den = (same_t + same_p) * N - 2 * expected;  // 2 * (N * max - N * E)
  if (den == 0) return {1, 1};
  return {2 * num, den};
}

/// Squared FMI as an exact fraction: tp^2 / ((tp + fp)(tp + fn)).
inline Fraction fmi_squared(const PairCounts& c) {
  if (c.tp == 0) return {0, 1};
  __extension__ using i128 = __int128;
  return {static_cast<i128>(c.tp) * c.tp, static_cast<i128>(c.tp + c.fp) * (c.tp + c.fn)};
}

// ------------------------------------------------------------ reductions

struct EigenPairs {
  std::vector<double> values;              // descending
  std::vector<Eigen::VectorXd> vectors;   // unit norm
};

/// Full-space generalized eigenproblem (Sw + ridge * tau * I)^-1 Sb solved
/// with the general (non-symmetric) eigensolver.
inline EigenPairs lda_reference(const Eigen::MatrixXd& X, const std::vector<int>& y, double ridge) {
  const Eigen::Index n = X.rows(), d = X.cols();
  const int classes = *std::max_element(y.begin(), y.end()) + 1;
  const Eigen::RowVectorXd mean = X.colwise().mean();
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d), sb = Eigen::MatrixXd::Zero(d, d);
  for (int c = 0; c < classes; ++c) {
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(d);
    int count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y[static_cast<std::size_t>(i)] == c) {
        mu += X.row(i);
        ++count;
      }
    }
    mu /= count;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y[static_cast<std::size_t>(i)] == c) sw += (X.row(i) - mu).transpose() * (X.row(i) - mu);
    }
    sb += count * (mu - mean).transpose() * (mu - mean);
  }
  const double tau = sw.trace() / static_cast<double>(d);
  const Eigen::MatrixXd a = sw + ridge * tau * Eigen::MatrixXd::Identity(d, d);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a.inverse() * sb);
  std::vector<std::pair<double, Eigen::VectorXd>> pairs;
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd v = es.eigenvectors().col(j).real();
    pairs.emplace_back(es.eigenvalues()(j).real(), v.normalized());
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& p, const auto& q) { return p.first > q.first; });
  EigenPairs out;
  for (auto& [value, vec] : pairs) {
    out.values.push_back(value);
    out.vectors.push_back(vec);
  }
  return out;
}

/// Eigen-decomposition of the sample covariance (n - 1 denominator).
inline EigenPairs pca_reference(const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(X.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  EigenPairs out;
  for (Eigen::Index j = X.cols() - 1; j >= 0; --j) {
    out.values.push_back(es.eigenvalues()(j));
    out.vectors.push_back(es.eigenvectors().col(j));
  }
  return out;
}

/// 1 - |cos| between two directions.
inline double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 1.0 - std::abs(a.dot(b)) / (a.norm() * b.norm());
}

// --------------------------------------------------------------- k-means

/// Minimum within-cluster sum of squares over every partition of the rows
/// into exactly k non-empty groups.
inline double best_partition_ss(const Eigen::MatrixXd& X, int k) {
  const auto n = static_cast<int>(X.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  double best = std::numeric_limits<double>::infinity();
  // Restricted growth strings enumerate each set partition once.
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == n) {
      if (used != k) return;
      double ss = 0.0;
      for (int c = 0; c < k; ++c) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(X.cols());
        int count = 0;
        for (int r = 0; r < n; ++r) {
          if (labels[static_cast<std::size_t>(r)] == c) {
            mean += X.row(r);
            ++count;
          }
        }
        mean /= count;
        for (int r = 0; r < n; ++r) {
          if (labels[static_cast<std::size_t>(r)] == c) ss += (X.row(r) - mean).squaredNorm();
        }
      }
      best = std::min(best, ss);
      return;
    }
    for (int c = 0; c < std::min(used + 1, k); ++c) {
      labels[static_cast<std::size_t>(i)] = c;
      rec(i + 1, std::max(used, c + 1));
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace smc::oracle
