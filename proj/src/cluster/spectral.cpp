#include <algorithm>
#include <cmath>
#include <numeric>

#include "smc/cluster.hpp"
#include "smc/error.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

std::vector<int> connected_components(const Eigen::MatrixXd& A, int& count) {
  const Eigen::Index n = A.rows();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  count = 0;
  std::vector<Eigen::Index> stack;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    comp[static_cast<std::size_t>(s)] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        if (A(u, v) > 0.0 && comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = count;
          stack.push_back(v);
        }
      }
    }
    ++count;
  }
  return comp;
}

double median_pairwise_distance(const Eigen::MatrixXd& X) {
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(X.rows() * (X.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < X.rows(); ++j) d.push_back((X.row(i) - X.row(j)).norm());
  }
  if (d.empty()) return 0.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) med = 0.5 * (med + *std::max_element(d.begin(), mid));
  if (med > 0.0) return med;
  // Mostly duplicates: fall back to the mean of the non-zero distances.
  double sum = 0.0;
  std::size_t cnt = 0;
  for (double v : d) {
    if (v > 0.0) {
      sum += v;
      ++cnt;
    }
  }
  return cnt ? sum / static_cast<double>(cnt) : 0.0;
}

}  // namespace

Eigen::MatrixXd affinity_matrix(const Eigen::MatrixXd& X, const SpectralOptions& opts) {
  const Eigen::Index n = X.rows();
  require(n >= 1, "affinity of empty data");
  require(X.allFinite(), "spectral input contains non-finite values");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  if (opts.affinity == Affinity::Rbf) {
    double gamma = opts.gamma;
    if (gamma <= 0.0) {
      const double med = median_pairwise_distance(X);
      gamma = med > 0.0 ? 1.0 / (2.0 * med * med) : 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        A(i, j) = A(j, i) = std::exp(-gamma * (X.row(i) - X.row(j)).squaredNorm());
      }
    }
    return A;
  }
  require(opts.n_neighbors >= 1, "k-NN affinity needs at least one neighbour");
  const auto neighbours = std::min<Eigen::Index>(opts.n_neighbors, n - 1);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd d = (X.rowwise() - X.row(i)).rowwise().squaredNorm();
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      if (a == i) return b != i;  // self first, then excluded
      if (b == i) return false;
      return d(a) < d(b);
    });
    for (Eigen::Index t = 1; t <= neighbours; ++t) A(i, order[static_cast<std::size_t>(t)]) += 0.5;
  }
  return A + A.transpose();
}

ClusterAssignment spectral_from_affinity(const Eigen::MatrixXd& A, int k,
                                         const SpectralOptions& opts,
                                         const Eigen::MatrixXd* coords) {
  const Eigen::Index n = A.rows();
  require(A.cols() == n && n >= 1, "affinity must be square and non-empty");
  require(k >= 1 && k <= n, "spectral clustering needs 1 <= K <= n");
  require(A.allFinite() && (A.array() >= 0.0).all(), "affinity must be finite and non-negative");

  Eigen::MatrixXd W = 0.5 * (A + A.transpose());
  W.diagonal().setZero();

  ClusterAssignment out;
  out.k = k;
  out.seed = opts.seed;

  int components = 0;
  const std::vector<int> comp = connected_components(W, components);
  if (components > k) {
    // Each component is kept whole; components are grouped down to k.
    Eigen::MatrixXd summary;
    if (coords) {
      require(coords->rows() == n, "coordinate rows must match the affinity");
      summary = Eigen::MatrixXd::Zero(components, coords->cols());
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(components);
      for (Eigen::Index i = 0; i < n; ++i) {
        summary.row(comp[static_cast<std::size_t>(i)]) += coords->row(i);
        counts(comp[static_cast<std::size_t>(i)]) += 1.0;
      }
      summary.array().colwise() /= counts.array();
    } else {
      summary = Eigen::VectorXd::LinSpaced(components, 0.0, components - 1.0);
    }
    const ClusterAssignment grouped = agglomerative(summary, k);
    out.labels.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      out.labels[static_cast<std::size_t>(i)] =
          grouped.labels[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])];
    }
    return out;
  }

  const Eigen::VectorXd degree = W.rowwise().sum();
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
  Eigen::MatrixXd L = -(inv_sqrt.asDiagonal() * W * inv_sqrt.asDiagonal());
  for (Eigen::Index i = 0; i < n; ++i) L(i, i) += degree(i) > 0.0 ? 1.0 : 0.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  if (eig.info() != Eigen::Success) fail(ErrorCode::InvalidInput, "spectral eigensolver failed");
  Eigen::MatrixXd embedding = eig.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }

  KMeansOptions km;
  km.seed = derive_seed(opts.seed, {"spectral-kmeans"});
  km.n_init = opts.n_init;
  out.labels = kmeans(embedding, k, km).labels;
  return out;
}

ClusterAssignment spectral(const Eigen::MatrixXd& X, int k, const SpectralOptions& opts) {
  require(k >= 1 && k <= X.rows(), "spectral clustering needs 1 <= K <= n");
  const Eigen::MatrixXd A = affinity_matrix(X, opts);
  return spectral_from_affinity(A, k, opts, &X);
}

}  // namespace smc
