#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smc {

/// Result of one clustering call.
struct ClusterAssignment {
  std::vector<int> labels;              // n indices in [0, k-1]
  int k = 0;
  std::vector<double> objective_trace;  // one value per iteration, algorithm-specific
  std::uint64_t seed = 0;
};

struct KMeansOptions {
  std::uint64_t seed = 0;
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-12;  // relative objective decrease that counts as converged
};

/// Lloyd iterations from k-means++ seeds, best of n_init restarts by
/// within-cluster sum of squares. An emptied cluster is refilled with the
/// point farthest from its centroid. The trace holds the within-cluster sum
/// of squares after every assignment step.
ClusterAssignment kmeans(const Eigen::MatrixXd& X, int k, const KMeansOptions& opts = {});

/// Within-cluster sum of squares of a labelling around its cluster means.
double within_cluster_ss(const Eigen::MatrixXd& X, const std::vector<int>& labels, int k);

struct KMedoidsOptions {
  std::uint64_t seed = 0;
  int n_init = 10;
  int max_iter = 100;
};

/// Alternating medoid update / reassignment on Euclidean distances with
/// k-means++-style seeding. Trace holds the summed point-to-medoid distance.
ClusterAssignment kmedoids(const Eigen::MatrixXd& X, int k, const KMedoidsOptions& opts = {});

struct GmmOptions {
  std::uint64_t seed = 0;
  int max_iter = 200;
  double tol = 1e-10;
  double cov_reg = 1e-6;
  int init_n_init = 10;
};

struct GmmModel {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  std::vector<int> labels;
  /// Negative log-likelihood plus the covariance penalty after each E-step.
  std::vector<double> objective_trace;
};

/// EM for a full-covariance Gaussian mixture starting from hard labels. The
/// M-step uses Sigma_k = (S_k + cov_reg * I) / N_k, which is the exact
/// maximizer of the log-likelihood penalized by -cov_reg/2 * tr(Sigma_k^-1),
/// so the traced penalized objective never increases.
GmmModel gmm_em(const Eigen::MatrixXd& X, const std::vector<int>& initial_labels, int k,
                const GmmOptions& opts = {});

/// gmm_em initialized from a k-means run; labels are argmax responsibilities.
ClusterAssignment gmm(const Eigen::MatrixXd& X, int k, const GmmOptions& opts = {});

enum class Linkage { Ward };

/// Bottom-up Ward merging via the Lance-Williams update; ties go to the pair
/// with the smallest (i, j) indices. Clusters are numbered by their smallest
/// member index. Trace holds the merge heights.
ClusterAssignment agglomerative(const Eigen::MatrixXd& X, int k, Linkage linkage = Linkage::Ward);

struct BirchOptions {
  double threshold = 0.5;
  int branching = 50;
  /// When set, the threshold is a multiple of the data's RMS distance to its
  /// centroid instead of an absolute radius.
  bool relative = false;
};

/// CF-tree leaf subclusters, in tree order.
struct BirchSubclusters {
  std::vector<Eigen::VectorXd> centroids;
  std::vector<int> counts;
};

BirchSubclusters birch_subclusters(const Eigen::MatrixXd& X, double threshold, int branching);

/// CF-tree subclusters, Ward-agglomerated to k groups; every point takes the
/// group of its nearest subcluster centroid.
ClusterAssignment birch(const Eigen::MatrixXd& X, int k, const BirchOptions& opts = {});

enum class Affinity { Rbf, Knn };

struct SpectralOptions {
  Affinity affinity = Affinity::Rbf;
  double gamma = 0.0;  // <= 0: 1 / (2 * median pairwise distance^2)
  int n_neighbors = 10;
  std::uint64_t seed = 0;
  int n_init = 10;
};

Eigen::MatrixXd affinity_matrix(const Eigen::MatrixXd& X, const SpectralOptions& opts);

/// Normalized spectral clustering on a precomputed symmetric affinity.
/// When the graph has more connected components than k, components are
/// merged by Ward linkage on their centroids in `coords` (or by component
/// size order when no coordinates are given).
ClusterAssignment spectral_from_affinity(const Eigen::MatrixXd& A, int k,
                                         const SpectralOptions& opts = {},
                                         const Eigen::MatrixXd* coords = nullptr);

ClusterAssignment spectral(const Eigen::MatrixXd& X, int k, const SpectralOptions& opts = {});

/// How views are rescaled before RMKMC. Columns z-scores every dimension;
/// View centers the view and divides it by its RMS distance to the centroid,
/// which keeps the shape of each view intact.
enum class ViewScaling { None, Columns, View };

std::string to_string(ViewScaling s);
ViewScaling parse_view_scaling(const std::string& text);

struct RmkmcOptions {
  double gamma = 2.0;
  std::uint64_t seed = 0;
  int max_iter = 100;
  double tol = 1e-10;
  ViewScaling scaling = ViewScaling::View;
  int init_n_init = 10;
};

struct RmkmcResult {
  ClusterAssignment assignment;
  std::vector<double> alpha;                     // final view weights
  std::vector<std::vector<double>> alpha_trace;  // weights after every iteration
  std::vector<Eigen::MatrixXd> centroids;        // per view, k x d_v
  std::vector<double> residuals;                 // per-view L2,1 residual H_v
};

/// Robust multi-view k-means: minimizes sum_v alpha_v^gamma * ||X_v - G F_v||_{2,1}
/// over a shared indicator G, per-view centroids F_v, and simplex weights alpha.
RmkmcResult rmkmc(const std::vector<Eigen::MatrixXd>& views, int k, const RmkmcOptions& opts = {});

/// Per-column zero mean / unit variance; constant columns become zero.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& X);

/// Centered, divided by the RMS distance to the centroid; a constant view becomes zero.
Eigen::MatrixXd standardize_view(const Eigen::MatrixXd& X);

enum class Algorithm { Gmm, KMeans, KMedoids, Agglomerative, Birch, Spectral };

inline constexpr Algorithm kSingleViewAlgorithms[] = {
    Algorithm::Gmm, Algorithm::KMeans, Algorithm::KMedoids,
    Algorithm::Agglomerative, Algorithm::Birch, Algorithm::Spectral};

/// Display name used in reports ("GMM", "K-Means", ...).
std::string display_name(Algorithm a);
/// Short CLI/config name ("gmm", "kmeans", "kmedoids", "ac", "birch", "sc").
std::string key_name(Algorithm a);
Algorithm parse_algorithm(const std::string& text);

struct AlgorithmOptions {
  KMeansOptions kmeans;
  KMedoidsOptions kmedoids;
  GmmOptions gmm;
  BirchOptions birch{0.1, 50, true};
  SpectralOptions spectral;
};

/// Runs one single-view algorithm; `seed` overrides the per-algorithm seeds.
ClusterAssignment run_algorithm(Algorithm a, const Eigen::MatrixXd& X, int k,
                                const AlgorithmOptions& opts, std::uint64_t seed);

}  // namespace smc
