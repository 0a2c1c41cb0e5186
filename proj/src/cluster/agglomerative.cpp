#include <limits>

#include "smc/cluster.hpp"
#include "smc/error.hpp"

namespace smc {

ClusterAssignment agglomerative(const Eigen::MatrixXd& X, int k, Linkage linkage) {
  const Eigen::Index n = X.rows();
  require(n >= 1, "agglomerative clustering on empty data");
  require(k >= 1 && k <= n, "agglomerative clustering needs 1 <= K <= n");
  require(linkage == Linkage::Ward, "only Ward linkage is supported");
  require(X.allFinite(), "agglomerative input contains non-finite values");

  // Slot i holds the cluster whose smallest member is i; merging (i, j) with
  // i < j keeps slot i. Distances start as squared Euclidean distances.
  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = (X.row(i) - X.row(j)).squaredNorm();
    }
  }
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);
  std::vector<char> active(static_cast<std::size_t>(n), 1);
  for (Eigen::Index i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;

  ClusterAssignment out;
  out.k = k;
  for (Eigen::Index remaining = n; remaining > k; --remaining) {
    Eigen::Index bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        if (dist(i, j) < best) {
          best = dist(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    out.objective_trace.push_back(best);

    const double ni = size[static_cast<std::size_t>(bi)];
    const double nj = size[static_cast<std::size_t>(bj)];
    for (Eigen::Index m = 0; m < n; ++m) {
      if (!active[static_cast<std::size_t>(m)] || m == bi || m == bj) continue;
      const double nm = size[static_cast<std::size_t>(m)];
      const double updated =
          ((ni + nm) * dist(bi, m) + (nj + nm) * dist(bj, m) - nm * dist(bi, bj)) / (ni + nj + nm);
      dist(bi, m) = dist(m, bi) = updated;
    }
    size[static_cast<std::size_t>(bi)] = ni + nj;
    active[static_cast<std::size_t>(bj)] = 0;
    parent[static_cast<std::size_t>(bj)] = bi;
  }

  std::vector<int> slot_label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (active[static_cast<std::size_t>(i)]) slot_label[static_cast<std::size_t>(i)] = next++;
  }
  out.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index root = i;
    while (parent[static_cast<std::size_t>(root)] != root) root = parent[static_cast<std::size_t>(root)];
    out.labels[static_cast<std::size_t>(i)] = slot_label[static_cast<std::size_t>(root)];
  }
  return out;
}

}  // namespace smc
