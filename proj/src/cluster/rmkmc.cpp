#include <algorithm>
#include <cmath>
#include <string>
#include <limits>

#include "smc/cluster.hpp"
#include "smc/error.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

constexpr double kResidualFloor = 1e-10;

// Per-sample residual norms ||x_i - f_{g_i}|| for one view.
Eigen::VectorXd residual_norms(const Eigen::MatrixXd& X, const Eigen::MatrixXd& F,
                               const std::vector<int>& labels) {
  Eigen::VectorXd r(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    r(i) = (X.row(i) - F.row(labels[static_cast<std::size_t>(i)])).norm();
  }
  return r;
}

// alpha_v proportional to H_v^(1/(1-gamma)); views with zero residual share
// all the weight when present.
std::vector<double> view_weights(const std::vector<double>& H, double gamma) {
  const std::size_t m = H.size();
  std::vector<double> alpha(m, 0.0);
  std::size_t zeros = 0;
  for (double h : H) zeros += h <= 0.0 ? 1 : 0;
  if (zeros > 0) {
    for (std::size_t v = 0; v < m; ++v) alpha[v] = H[v] <= 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
    return alpha;
  }
  // Work relative to the smallest residual so the powers stay finite.
  const double h_min = *std::min_element(H.begin(), H.end());
  const double exponent = 1.0 / (1.0 - gamma);
  double total = 0.0;
  for (std::size_t v = 0; v < m; ++v) {
    alpha[v] = std::pow(H[v] / h_min, exponent);
    total += alpha[v];
  }
  for (double& a : alpha) a /= total;
  return alpha;
}

double objective(const std::vector<double>& alpha, const std::vector<double>& H, double gamma) {
  double total = 0.0;
  for (std::size_t v = 0; v < H.size(); ++v) total += std::pow(alpha[v], gamma) * H[v];
  return total;
}

}  // namespace

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out = X;
  if (X.rows() == 0) return out;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double mean = X.col(c).mean();
    const double var = (X.col(c).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      out.col(c) = (X.col(c).array() - mean) / sd;
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

Eigen::MatrixXd standardize_view(const Eigen::MatrixXd& X) {
  if (X.rows() == 0) return X;
  const Eigen::RowVectorXd mean = X.colwise().mean();
  Eigen::MatrixXd out = X.rowwise() - mean;
  const double rms = std::sqrt(out.squaredNorm() / static_cast<double>(X.rows()));
  const double scale = std::max(1.0, mean.cwiseAbs().maxCoeff());
  if (rms > 1e-12 * scale) {
    out /= rms;
  } else {
    out.setZero();
  }
  return out;
}

std::string to_string(ViewScaling s) {
  switch (s) {
    case ViewScaling::None: return "none";
    case ViewScaling::Columns: return "columns";
    case ViewScaling::View: return "view";
  }
  return "none";
}

ViewScaling parse_view_scaling(const std::string& text) {
  if (text == "none") return ViewScaling::None;
  if (text == "columns") return ViewScaling::Columns;
  if (text == "view") return ViewScaling::View;
  fail(ErrorCode::InvalidInput, "unknown view scaling '" + text + "' (none, columns, view)");
}

RmkmcResult rmkmc(const std::vector<Eigen::MatrixXd>& raw_views, int k, const RmkmcOptions& opts) {
  require(!raw_views.empty(), "RMKMC needs at least one view");
  const Eigen::Index n = raw_views.front().rows();
  for (const auto& v : raw_views) {
    require(v.rows() == n, "RMKMC views must share the sample count");
    require(v.cols() >= 1, "RMKMC views need at least one column");
    require(v.allFinite(), "RMKMC input contains non-finite values");
  }
  require(opts.gamma > 1.0, "RMKMC gamma must exceed 1");
  require(k >= 1 && k <= n, "RMKMC needs 1 <= K <= n");
  const std::size_t m = raw_views.size();

  std::vector<Eigen::MatrixXd> views;
  views.reserve(m);
  for (const auto& v : raw_views) {
    switch (opts.scaling) {
      case ViewScaling::None: views.push_back(v); break;
      case ViewScaling::Columns: views.push_back(standardize_columns(v)); break;
      case ViewScaling::View: views.push_back(standardize_view(v)); break;
    }
  }

  // Initial indicator from k-means on the concatenated views.
  Eigen::Index total_cols = 0;
  for (const auto& v : views) total_cols += v.cols();
  Eigen::MatrixXd joined(n, total_cols);
  Eigen::Index offset = 0;
  for (const auto& v : views) {
    joined.middleCols(offset, v.cols()) = v;
    offset += v.cols();
  }
  KMeansOptions init;
  init.seed = derive_seed(opts.seed, {"rmkmc-init"});
  init.n_init = opts.init_n_init;
  std::vector<int> labels = kmeans(joined, k, init).labels;

  // Initial centroids are the plain cluster means.
  std::vector<Eigen::MatrixXd> F(m);
  for (std::size_t v = 0; v < m; ++v) {
    F[v] = Eigen::MatrixXd::Zero(k, views[v].cols());
    std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      F[v].row(labels[static_cast<std::size_t>(i)]) += views[v].row(i);
      sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1.0;
    }
    for (int c = 0; c < k; ++c) F[v].row(c) /= sizes[static_cast<std::size_t>(c)];
  }

  std::vector<double> alpha(m, 1.0 / static_cast<double>(m));
  std::vector<double> H(m);
  for (std::size_t v = 0; v < m; ++v) H[v] = residual_norms(views[v], F[v], labels).sum();

  RmkmcResult result;
  result.alpha_trace.push_back(alpha);
  result.assignment.objective_trace.push_back(objective(alpha, H, opts.gamma));

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const std::vector<int> previous = labels;

    // (a) Centroids by one reweighted least-squares step per view.
    for (std::size_t v = 0; v < m; ++v) {
      const Eigen::VectorXd r = residual_norms(views[v], F[v], labels);
      Eigen::MatrixXd num = Eigen::MatrixXd::Zero(k, views[v].cols());
      Eigen::VectorXd den = Eigen::VectorXd::Zero(k);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double w = 1.0 / (2.0 * std::max(r(i), kResidualFloor));
        const int c = labels[static_cast<std::size_t>(i)];
        num.row(c) += w * views[v].row(i);
        den(c) += w;
      }
      for (int c = 0; c < k; ++c) {
        if (den(c) > 0.0) F[v].row(c) = num.row(c) / den(c);
      }
    }

    // (b) Shared indicator: weighted sum of per-view distances.
    std::vector<double> weight(m);
    for (std::size_t v = 0; v < m; ++v) weight[v] = std::pow(alpha[v], opts.gamma);
    Eigen::VectorXd cost(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        double s = 0.0;
        for (std::size_t v = 0; v < m; ++v) s += weight[v] * (views[v].row(i) - F[v].row(c)).norm();
        if (s < best) {
          best = s;
          arg = c;
        }
      }
      labels[static_cast<std::size_t>(i)] = arg;
      cost(i) = best;
    }

    // Empty clusters take the sample with the largest weighted residual.
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || cost(i) > cost(far)) far = i;
      }
      if (far < 0) break;
      --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      sizes[static_cast<std::size_t>(c)] = 1;
      for (std::size_t v = 0; v < m; ++v) F[v].row(c) = views[v].row(far);
      cost(far) = 0.0;
    }

    // (c) View weights in closed form.
    for (std::size_t v = 0; v < m; ++v) H[v] = residual_norms(views[v], F[v], labels).sum();
    alpha = view_weights(H, opts.gamma);

    const double current = objective(alpha, H, opts.gamma);
    const double last = result.assignment.objective_trace.back();
    result.alpha_trace.push_back(alpha);
    result.assignment.objective_trace.push_back(current);
    if (labels == previous && last - current <= opts.tol * std::max(1.0, std::abs(last))) break;
  }

  result.assignment.labels = std::move(labels);
  result.assignment.k = k;
  result.assignment.seed = opts.seed;
  result.alpha = std::move(alpha);
  result.centroids = std::move(F);
  result.residuals = std::move(H);
  return result;
}

}  // namespace smc
