#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

namespace smc {

enum class ReductionKind { LDA, PCA };

std::string to_string(ReductionKind kind);
ReductionKind parse_reduction_kind(const std::string& text);

/// Fitted linear projection x -> (x - mean) * basis.
struct ProjectionModel {
  ReductionKind kind = ReductionKind::LDA;
  Eigen::VectorXd mean;      // d
  Eigen::MatrixXd basis;     // d x k, unit-norm columns
  Eigen::VectorXd spectrum;  // k generalized eigenvalues (LDA) or component variances (PCA)
  int class_count = 0;       // LDA only
  double ridge = 0.0;        // LDA only

  Eigen::Index input_dim() const { return basis.rows(); }
  Eigen::Index output_dim() const { return basis.cols(); }
};

/// Reduced data for M views over the same samples.
struct ReducedViews {
  std::vector<std::string> names;
  std::vector<Eigen::MatrixXd> views;  // each n x k
  std::vector<ProjectionModel> models;
};

/// Ridge-regularized LDA. The basis holds the top-k generalized eigenvectors
/// of (Sw + ridge * tau * I)^-1 Sb with tau = trace(Sw) / d, ordered by
/// descending eigenvalue; each column has unit norm and its largest-magnitude
/// coordinate positive. Equal eigenvalues are ordered by the first coordinate
/// in which their eigenvectors differ, larger first.
///
/// The problem is solved in the span of the centered training rows, which is
/// exact for every direction with a positive eigenvalue and keeps the cost at
/// O(n^2 d) when d >> n.
ProjectionModel lda_fit(const Eigen::MatrixXd& X, std::span<const int> y, int k,
                        double ridge = 1e-6);

/// Top-k principal directions of the centered rows (same sign convention).
ProjectionModel pca_fit(const Eigen::MatrixXd& X, int k);

Eigen::MatrixXd transform(const ProjectionModel& model, const Eigen::MatrixXd& X);

/// Flips the column so its largest-magnitude coordinate is positive.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v);

nlohmann::json to_json(const ProjectionModel& model);
ProjectionModel projection_model_from_json(const nlohmann::json& j);

}  // namespace smc
