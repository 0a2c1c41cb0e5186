#include <algorithm>
#include <limits>

#include "smc/cluster.hpp"
#include "smc/error.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

struct LloydRun {
  std::vector<int> labels;
  std::vector<double> trace;
  double objective = std::numeric_limits<double>::infinity();
};

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& X, int k, Rng& rng) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd centers(k, X.cols());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  auto first = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
  centers.row(0) = X.row(first);
  chosen[static_cast<std::size_t>(first)] = 1;

  Eigen::VectorXd d2 = (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2(i) > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All remaining points coincide with a center; take an unused index.
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
      }
      pick = unused[rng.index(unused.size())];
    }
    chosen[static_cast<std::size_t>(pick)] = 1;
    centers.row(c) = X.row(pick);
    d2 = d2.cwiseMin((X.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

// Assigns every point to its nearest center (lowest index on ties) and
// returns the per-point squared distances.
Eigen::VectorXd assign(const Eigen::MatrixXd& X, const Eigen::MatrixXd& centers,
                       std::vector<int>& labels) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd best(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double bd = std::numeric_limits<double>::infinity();
    int bc = 0;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (X.row(i) - centers.row(c)).squaredNorm();
      if (d < bd) {
        bd = d;
        bc = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = bc;
    best(i) = bd;
  }
  return best;
}

LloydRun lloyd(const Eigen::MatrixXd& X, Eigen::MatrixXd centers, const KMeansOptions& opts) {
  const Eigen::Index n = X.rows();
  const auto k = static_cast<int>(centers.rows());
  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> previous;

  for (int iter = 0; iter < std::max(1, opts.max_iter); ++iter) {
    Eigen::VectorXd dist = assign(X, centers, run.labels);

    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : run.labels) ++sizes[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      // Refill from the point with the largest residual whose cluster can spare it.
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || dist(i) > dist(far)) far = i;
      }
      if (far < 0) break;
      --sizes[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(far)])];
      run.labels[static_cast<std::size_t>(far)] = c;
      sizes[static_cast<std::size_t>(c)] = 1;
      centers.row(c) = X.row(far);
      dist(far) = 0.0;
    }

    const double objective = dist.sum();
    const bool stable = run.labels == previous;
    const bool flat = !run.trace.empty() &&
                      run.trace.back() - objective <= opts.tol * std::max(1.0, std::abs(run.trace.back()));
    run.trace.push_back(objective);
    run.objective = objective;
    if (stable || flat) break;
    previous = run.labels;

    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centers.row(run.labels[static_cast<std::size_t>(i)]) += X.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
  }
  return run;
}

}  // namespace

double within_cluster_ss(const Eigen::MatrixXd& X, const std::vector<int>& labels, int k) {
  require(static_cast<std::size_t>(X.rows()) == labels.size(), "label count mismatch");
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    require(l >= 0 && l < k, "label out of range");
    sums.row(l) += X.row(i);
    ++sizes[static_cast<std::size_t>(l)];
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    total += (X.row(i) - sums.row(l) / sizes[static_cast<std::size_t>(l)]).squaredNorm();
  }
  return total;
}

ClusterAssignment kmeans(const Eigen::MatrixXd& X, int k, const KMeansOptions& opts) {
  require(X.rows() >= 1, "k-means on empty data");
  require(k >= 1 && k <= X.rows(), "k-means needs 1 <= K <= n");
  require(X.allFinite(), "k-means input contains non-finite values");

  Rng rng(opts.seed);
  LloydRun best;
  for (int r = 0; r < std::max(1, opts.n_init); ++r) {
    LloydRun run = lloyd(X, plus_plus_seeds(X, k, rng), opts);
    if (run.objective < best.objective) best = std::move(run);
  }
  ClusterAssignment out;
  out.labels = std::move(best.labels);
  out.k = k;
  out.objective_trace = std::move(best.trace);
  out.seed = opts.seed;
  return out;
}

}  // namespace smc
