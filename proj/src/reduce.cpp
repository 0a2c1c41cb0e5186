#include "smc/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "smc/error.hpp"

namespace smc {

std::string to_string(ReductionKind kind) { return kind == ReductionKind::LDA ? "lda" : "pca"; }

ReductionKind parse_reduction_kind(const std::string& text) {
  if (text == "lda" || text == "LDA") return ReductionKind::LDA;
  if (text == "pca" || text == "PCA") return ReductionKind::PCA;
  fail(ErrorCode::InvalidInput, "unknown reduction '" + text + "' (expected lda or pca)");
}

void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
}

namespace {

// Orders eigenpairs by descending eigenvalue; near-equal eigenvalues fall
// back to lexicographic comparison of the (sign-fixed) eigenvectors.
std::vector<Eigen::Index> ordered_indices(const Eigen::VectorXd& values,
                                          const Eigen::MatrixXd& vectors) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double va = values(a), vb = values(b);
    const double tol = 1e-12 * std::max({1.0, std::abs(va), std::abs(vb)});
    if (std::abs(va - vb) > tol) return va > vb;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      if (vectors(r, a) != vectors(r, b)) return vectors(r, a) > vectors(r, b);
    }
    return false;
  });
  return order;
}

// Orthonormal basis (d x r) of the row space of the centered data.
Eigen::MatrixXd row_space_basis(const Eigen::MatrixXd& centered) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return Eigen::MatrixXd(centered.cols(), 0);
  const double tol = s(0) * static_cast<double>(std::max(centered.rows(), centered.cols())) *
                     std::numeric_limits<double>::epsilon();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  return svd.matrixV().leftCols(rank);
}

}  // namespace

ProjectionModel lda_fit(const Eigen::MatrixXd& X, std::span<const int> y, int k, double ridge) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  require(static_cast<std::size_t>(n) == y.size(), "LDA label count does not match row count");
  require(d >= 1, "LDA needs at least one feature");
  require(ridge >= 0.0 && std::isfinite(ridge), "LDA ridge must be finite and non-negative");
  require(X.allFinite(), "LDA input contains non-finite values");

  std::map<int, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < n; ++i) members[y[static_cast<std::size_t>(i)]].push_back(i);
  const int classes = static_cast<int>(members.size());
  require(classes >= 2, "LDA needs at least two classes");
  for (const auto& [label, idx] : members) {
    if (idx.size() < 2) {
      fail(ErrorCode::DegenerateClass,
           "class " + std::to_string(label) + " has fewer than 2 samples");
    }
  }
  require(k >= 1 && k <= classes - 1, "LDA output dimension must lie in [1, C-1]");

  const Eigen::VectorXd mean = X.colwise().mean().transpose();
  Eigen::MatrixXd within(n, d);
  Eigen::MatrixXd class_offsets(classes, d);
  Eigen::VectorXd class_sizes(classes);
  int c = 0;
  for (const auto& [label, idx] : members) {
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index i : idx) mu += X.row(i);
    mu /= static_cast<double>(idx.size());
    for (Eigen::Index i : idx) within.row(i) = X.row(i) - mu;
    class_offsets.row(c) = mu - mean.transpose();
    class_sizes(c) = static_cast<double>(idx.size());
    ++c;
  }

  const Eigen::MatrixXd basis_span = row_space_basis(X.rowwise() - mean.transpose());
  const Eigen::Index r = basis_span.cols();
  require(r >= k, "training data spans fewer dimensions than the requested LDA output");

  const double tau = within.squaredNorm() / static_cast<double>(d);
  const Eigen::MatrixXd within_r = within * basis_span;
  const Eigen::MatrixXd offsets_r = class_offsets * basis_span;
  Eigen::MatrixXd sw = within_r.transpose() * within_r;
  sw.diagonal().array() += ridge * tau;
  const Eigen::MatrixXd sb = offsets_r.transpose() * class_sizes.asDiagonal() * offsets_r;

  Eigen::LLT<Eigen::MatrixXd> chol(sw);
  if (chol.info() != Eigen::Success) {
    fail(ErrorCode::InvalidInput,
         "within-class scatter is singular; use a positive ridge");
  }
  // Whitened problem L^-1 Sb L^-T w = lambda w, then v = L^-T w.
  const Eigen::MatrixXd L = chol.matrixL();
  Eigen::MatrixXd tmp = L.triangularView<Eigen::Lower>().solve(sb);
  Eigen::MatrixXd whitened =
      L.triangularView<Eigen::Lower>().solve(tmp.transpose()).transpose();
  whitened = 0.5 * (whitened + whitened.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(whitened);
  if (eig.info() != Eigen::Success) fail(ErrorCode::InvalidInput, "LDA eigensolver failed");

  Eigen::MatrixXd directions =
      basis_span * L.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors());
  for (Eigen::Index j = 0; j < directions.cols(); ++j) {
    const double norm = directions.col(j).norm();
    if (norm > 0.0) directions.col(j) /= norm;
    canonicalize_sign(directions.col(j));
  }
  const auto order = ordered_indices(eig.eigenvalues(), directions);

  ProjectionModel model;
  model.kind = ReductionKind::LDA;
  model.mean = mean;
  model.basis.resize(d, k);
  model.spectrum.resize(k);
  for (int j = 0; j < k; ++j) {
    model.basis.col(j) = directions.col(order[static_cast<std::size_t>(j)]);
    model.spectrum(j) = eig.eigenvalues()(order[static_cast<std::size_t>(j)]);
  }
  model.class_count = classes;
  model.ridge = ridge;
  return model;
}

ProjectionModel pca_fit(const Eigen::MatrixXd& X, int k) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  require(n >= 2, "PCA needs at least two samples");
  require(k >= 1 && k <= std::min<Eigen::Index>(n - 1, d),
          "PCA output dimension must lie in [1, min(n-1, d)]");
  require(X.allFinite(), "PCA input contains non-finite values");

  const Eigen::VectorXd mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd centered = X.rowwise() - mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);

  Eigen::MatrixXd directions = svd.matrixV();
  for (Eigen::Index j = 0; j < directions.cols(); ++j) canonicalize_sign(directions.col(j));
  const Eigen::VectorXd variances =
      svd.singularValues().array().square() / static_cast<double>(n - 1);
  const auto order = ordered_indices(variances, directions);

  ProjectionModel model;
  model.kind = ReductionKind::PCA;
  model.mean = mean;
  model.basis.resize(d, k);
  model.spectrum.resize(k);
  for (int j = 0; j < k; ++j) {
    model.basis.col(j) = directions.col(order[static_cast<std::size_t>(j)]);
    model.spectrum(j) = variances(order[static_cast<std::size_t>(j)]);
  }
  return model;
}

Eigen::MatrixXd transform(const ProjectionModel& model, const Eigen::MatrixXd& X) {
  require(X.cols() == model.input_dim(),
          "transform input has " + std::to_string(X.cols()) + " columns, model expects " +
              std::to_string(model.input_dim()));
  return (X.rowwise() - model.mean.transpose()) * model.basis;
}

nlohmann::json to_json(const ProjectionModel& model) {
  nlohmann::json basis = nlohmann::json::array();
  for (Eigen::Index r = 0; r < model.basis.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < model.basis.cols(); ++c) row.push_back(model.basis(r, c));
    basis.push_back(std::move(row));
  }
  nlohmann::json j;
  j["kind"] = to_string(model.kind);
  j["d"] = model.input_dim();
  j["k"] = model.output_dim();
  j["class_count"] = model.class_count;
  j["ridge"] = model.ridge;
  j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
  j["spectrum"] =
      std::vector<double>(model.spectrum.data(), model.spectrum.data() + model.spectrum.size());
  j["basis"] = std::move(basis);
  return j;
}

ProjectionModel projection_model_from_json(const nlohmann::json& j) {
  try {
    ProjectionModel model;
    model.kind = parse_reduction_kind(j.at("kind").get<std::string>());
    const auto d = j.at("d").get<Eigen::Index>();
    const auto k = j.at("k").get<Eigen::Index>();
    model.class_count = j.value("class_count", 0);
    model.ridge = j.value("ridge", 0.0);
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto spectrum = j.at("spectrum").get<std::vector<double>>();
    require(static_cast<Eigen::Index>(mean.size()) == d, "model mean has wrong length");
    require(static_cast<Eigen::Index>(spectrum.size()) == k, "model spectrum has wrong length");
    model.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
    model.spectrum = Eigen::Map<const Eigen::VectorXd>(spectrum.data(), k);
    const auto& basis = j.at("basis");
    require(static_cast<Eigen::Index>(basis.size()) == d, "model basis has wrong row count");
    model.basis.resize(d, k);
    for (Eigen::Index r = 0; r < d; ++r) {
      const auto row = basis.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
      require(static_cast<Eigen::Index>(row.size()) == k, "model basis has wrong column count");
      for (Eigen::Index c = 0; c < k; ++c) model.basis(r, c) = row[static_cast<std::size_t>(c)];
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("malformed projection model: ") + e.what());
  }
}

}  // namespace smc
