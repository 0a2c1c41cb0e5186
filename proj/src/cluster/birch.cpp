#include <cmath>
#include <limits>
#include <memory>

#include "smc/cluster.hpp"
#include "smc/error.hpp"

namespace smc {

namespace {

/// Clustering feature: count, linear sum, squared sum.
struct Feature {
  double count = 0.0;
  Eigen::VectorXd linear;
  double squared = 0.0;

  static Feature of(const Eigen::VectorXd& x) { return {1.0, x, x.squaredNorm()}; }

  void absorb(const Feature& other) {
    count += other.count;
    linear += other.linear;
    squared += other.squared;
  }

  Eigen::VectorXd centroid() const { return linear / count; }

  // RMS distance of members to the centroid.
  double radius() const {
    const double r2 = squared / count - (linear / count).squaredNorm();
    return std::sqrt(std::max(0.0, r2));
  }
};

struct Node {
  bool leaf = true;
  std::vector<Feature> entries;
  std::vector<std::unique_ptr<Node>> children;  // parallel to entries when !leaf
};

std::size_t nearest_entry(const std::vector<Feature>& entries, const Eigen::VectorXd& x) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const double d = (entries[e].centroid() - x).squaredNorm();
    if (d < bd) {
      bd = d;
      best = e;
    }
  }
  return best;
}

class CfTree {
 public:
  CfTree(double threshold, int branching) : threshold_(threshold), branching_(branching) {}

  void insert(const Eigen::VectorXd& x) {
    if (auto sibling = insert_into(*root_, Feature::of(x))) {
      auto new_root = std::make_unique<Node>();
      new_root->leaf = false;
      new_root->entries.push_back(summarize(*root_));
      new_root->children.push_back(std::move(root_));
      new_root->entries.push_back(summarize(*sibling));
      new_root->children.push_back(std::move(sibling));
      root_ = std::move(new_root);
    }
  }

  void collect(BirchSubclusters& out) const { collect(*root_, out); }

 private:
  static Feature summarize(const Node& node) {
    Feature f = node.entries.front();
    for (std::size_t e = 1; e < node.entries.size(); ++e) f.absorb(node.entries[e]);
    return f;
  }

  // Inserts a point feature below `node`; returns a new sibling if `node` split.
  std::unique_ptr<Node> insert_into(Node& node, const Feature& point) {
    if (node.entries.empty()) {
      node.entries.push_back(point);
      return nullptr;
    }
    const std::size_t e = nearest_entry(node.entries, point.linear);
    if (node.leaf) {
      Feature merged = node.entries[e];
      merged.absorb(point);
      if (merged.radius() <= threshold_) {
        node.entries[e] = std::move(merged);
        return nullptr;
      }
      node.entries.push_back(point);
    } else {
      auto sibling = insert_into(*node.children[e], point);
      node.entries[e] = summarize(*node.children[e]);
      if (sibling) {
        node.entries.push_back(summarize(*sibling));
        node.children.push_back(std::move(sibling));
      }
    }
    if (static_cast<int>(node.entries.size()) <= branching_) return nullptr;
    return split(node);
  }

  // Farthest-pair split: the two most distant entries seed the halves.
  static std::unique_ptr<Node> split(Node& node) {
    const std::size_t m = node.entries.size();
    std::size_t a = 0, b = 1;
    double far = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double d = (node.entries[i].centroid() - node.entries[j].centroid()).squaredNorm();
        if (d > far) {
          far = d;
          a = i;
          b = j;
        }
      }
    }
    const Eigen::VectorXd ca = node.entries[a].centroid();
    const Eigen::VectorXd cb = node.entries[b].centroid();
    auto sibling = std::make_unique<Node>();
    sibling->leaf = node.leaf;
    Node kept;
    kept.leaf = node.leaf;
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::VectorXd c = node.entries[i].centroid();
      const bool to_b = i == b || (i != a && (c - cb).squaredNorm() < (c - ca).squaredNorm());
      Node& dst = to_b ? *sibling : kept;
      dst.entries.push_back(std::move(node.entries[i]));
      if (!node.leaf) dst.children.push_back(std::move(node.children[i]));
    }
    node = std::move(kept);
    return sibling;
  }

  static void collect(const Node& node, BirchSubclusters& out) {
    if (node.leaf) {
      for (const Feature& f : node.entries) {
        out.centroids.push_back(f.centroid());
        out.counts.push_back(static_cast<int>(f.count));
      }
      return;
    }
    for (const auto& child : node.children) collect(*child, out);
  }

  double threshold_;
  int branching_;
  std::unique_ptr<Node> root_ = std::make_unique<Node>();
};

}  // namespace

BirchSubclusters birch_subclusters(const Eigen::MatrixXd& X, double threshold, int branching) {
  require(X.rows() >= 1, "BIRCH on empty data");
  require(threshold >= 0.0 && std::isfinite(threshold), "BIRCH threshold must be finite and >= 0");
  require(branching >= 2, "BIRCH branching factor must be >= 2");
  require(X.allFinite(), "BIRCH input contains non-finite values");
  CfTree tree(threshold, branching);
  for (Eigen::Index i = 0; i < X.rows(); ++i) tree.insert(X.row(i).transpose());
  BirchSubclusters out;
  tree.collect(out);
  return out;
}

ClusterAssignment birch(const Eigen::MatrixXd& X, int k, const BirchOptions& opts) {
  require(k >= 1, "BIRCH needs K >= 1");
  double threshold = opts.threshold;
  if (opts.relative && X.rows() > 0) {
    const Eigen::RowVectorXd mean = X.colwise().mean();
    threshold *= std::sqrt((X.rowwise() - mean).rowwise().squaredNorm().mean());
  }
  const BirchSubclusters sub = birch_subclusters(X, threshold, opts.branching);
  const auto m = static_cast<Eigen::Index>(sub.centroids.size());
  if (k > m) {
    fail(ErrorCode::TooFewSubclusters, "BIRCH produced " + std::to_string(m) +
                                           " subclusters, fewer than K = " + std::to_string(k));
  }
  Eigen::MatrixXd centroids(m, X.cols());
  for (Eigen::Index s = 0; s < m; ++s) centroids.row(s) = sub.centroids[static_cast<std::size_t>(s)].transpose();
  const ClusterAssignment grouped = agglomerative(centroids, k);

  ClusterAssignment out;
  out.k = k;
  out.labels.resize(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index nearest = 0;
    (centroids.rowwise() - X.row(i)).rowwise().squaredNorm().minCoeff(&nearest);
    out.labels[static_cast<std::size_t>(i)] = grouped.labels[static_cast<std::size_t>(nearest)];
  }
  return out;
}

}  // namespace smc
