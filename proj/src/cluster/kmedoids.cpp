#include <algorithm>
#include <limits>

#include "smc/cluster.hpp"
#include "smc/error.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd D(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    D(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      D(i, j) = D(j, i) = (X.row(i) - X.row(j)).norm();
    }
  }
  return D;
}

std::vector<Eigen::Index> seed_medoids(const Eigen::MatrixXd& D, int k, Rng& rng) {
  const Eigen::Index n = D.rows();
  std::vector<Eigen::Index> medoids;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  medoids.push_back(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  used[static_cast<std::size_t>(medoids[0])] = 1;
  Eigen::VectorXd nearest = D.col(medoids[0]);
  while (static_cast<int>(medoids.size()) < k) {
    const double total = nearest.squaredNorm();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n && pick < 0; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        acc += nearest(i) * nearest(i);
        if (acc > target && nearest(i) > 0.0) pick = i;
      }
      for (Eigen::Index i = n - 1; i >= 0 && pick < 0; --i) {
        if (!used[static_cast<std::size_t>(i)] && nearest(i) > 0.0) pick = i;
      }
    }
    if (pick < 0) {
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!used[static_cast<std::size_t>(i)]) unused.push_back(i);
      }
      pick = unused[rng.index(unused.size())];
    }
    used[static_cast<std::size_t>(pick)] = 1;
    medoids.push_back(pick);
    nearest = nearest.cwiseMin(D.col(pick));
  }
  return medoids;
}

struct MedoidRun {
  std::vector<int> labels;
  std::vector<double> trace;
  double objective = std::numeric_limits<double>::infinity();
};

// A medoid always belongs to its own cluster, so no cluster can empty out.
double assign_to_medoids(const Eigen::MatrixXd& D, const std::vector<Eigen::Index>& medoids,
                         std::vector<int>& labels) {
  const Eigen::Index n = D.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      if (medoids[c] == i) {
        best = static_cast<int>(c);
        bd = 0.0;
        break;
      }
      if (D(i, medoids[c]) < bd) {
        bd = D(i, medoids[c]);
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    total += bd;
  }
  return total;
}

MedoidRun alternate(const Eigen::MatrixXd& D, std::vector<Eigen::Index> medoids, int max_iter) {
  const Eigen::Index n = D.rows();
  MedoidRun run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < std::max(1, max_iter); ++iter) {
    run.objective = assign_to_medoids(D, medoids, run.labels);
    run.trace.push_back(run.objective);

    bool changed = false;
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      double best_cost = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (run.labels[static_cast<std::size_t>(j)] == static_cast<int>(c)) best_cost += D(medoids[c], j);
      }
      Eigen::Index best = medoids[c];
      for (Eigen::Index i = 0; i < n; ++i) {
        if (run.labels[static_cast<std::size_t>(i)] != static_cast<int>(c) || i == medoids[c]) continue;
        double cost = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (run.labels[static_cast<std::size_t>(j)] == static_cast<int>(c)) cost += D(i, j);
        }
        if (cost < best_cost) {
          best_cost = cost;
          best = i;
        }
      }
      if (best != medoids[c]) {
        medoids[c] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return run;
}

}  // namespace

ClusterAssignment kmedoids(const Eigen::MatrixXd& X, int k, const KMedoidsOptions& opts) {
  require(X.rows() >= 1, "k-medoids on empty data");
  require(k >= 1 && k <= X.rows(), "k-medoids needs 1 <= K <= n");
  require(X.allFinite(), "k-medoids input contains non-finite values");

  const Eigen::MatrixXd D = pairwise_distances(X);
  Rng rng(opts.seed);
  MedoidRun best;
  for (int r = 0; r < std::max(1, opts.n_init); ++r) {
    MedoidRun run = alternate(D, seed_medoids(D, k, rng), opts.max_iter);
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
