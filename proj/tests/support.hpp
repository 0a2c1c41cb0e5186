#pragma once

#include <Eigen/Dense>
#include <vector>

#include "smc/random.hpp"

namespace smc::testing {

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, sd);
  }
  return m;
}

/// Gaussian blobs around the given centers (rows), `per` points each,
/// grouped by blob. Labels are written to `labels`.
inline Eigen::MatrixXd blobs(Rng& rng, const Eigen::MatrixXd& centers, int per, double sd,
                             std::vector<int>& labels) {
  const Eigen::Index k = centers.rows();
  Eigen::MatrixXd X(k * per, centers.cols());
  labels.clear();
  for (Eigen::Index c = 0; c < k; ++c) {
    for (int i = 0; i < per; ++i) {
      const Eigen::Index r = c * per + i;
      for (Eigen::Index j = 0; j < centers.cols(); ++j) X(r, j) = centers(c, j) + rng.normal(0.0, sd);
      labels.push_back(static_cast<int>(c));
    }
  }
  return X;
}

/// Two clouds far apart in 2-D.
inline Eigen::MatrixXd two_clouds(Rng& rng, int per, std::vector<int>& labels) {
  Eigen::MatrixXd centers(2, 2);
  centers << 0.0, 0.0, 20.0, 20.0;
  return blobs(rng, centers, per, 1.0, labels);
}

inline std::vector<int> random_labels(Rng& rng, std::size_t n, int k) {
  std::vector<int> y(n);
  for (int& v : y) v = static_cast<int>(rng.index(static_cast<std::size_t>(k)));
  return y;
}

}  // namespace smc::testing
