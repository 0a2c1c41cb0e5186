#include <cmath>
#include <limits>
#include <numbers>

#include "smc/cluster.hpp"
#include "smc/error.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

struct Component {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// M-step from responsibilities R (n x k). Components whose responsibility
// mass vanishes keep their previous mean and covariance.
void maximize(const Eigen::MatrixXd& X, const Eigen::MatrixXd& R, double cov_reg,
              std::vector<Component>& comps) {
  const Eigen::Index n = X.rows();
  for (Eigen::Index c = 0; c < R.cols(); ++c) {
    Component& comp = comps[static_cast<std::size_t>(c)];
    const double mass = R.col(c).sum();
    comp.weight = mass / static_cast<double>(n);
    if (mass <= 1e-10 * static_cast<double>(n)) continue;
    comp.mean = (X.transpose() * R.col(c)) / mass;
    const Eigen::MatrixXd centered = X.rowwise() - comp.mean.transpose();
    comp.cov = centered.transpose() * R.col(c).asDiagonal() * centered;
    comp.cov.diagonal().array() += cov_reg;
    comp.cov /= mass;
    comp.cov = 0.5 * (comp.cov + comp.cov.transpose());
  }
}

// E-step: fills R and returns the penalized negative log-likelihood.
double expect(const Eigen::MatrixXd& X, const std::vector<Component>& comps, double cov_reg,
              Eigen::MatrixXd& R) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const auto k = static_cast<Eigen::Index>(comps.size());
  Eigen::MatrixXd logp(n, k);
  double penalty = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    const Component& comp = comps[static_cast<std::size_t>(c)];
    if (comp.weight <= 0.0) {
      logp.col(c).setConstant(-std::numeric_limits<double>::infinity());
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(comp.cov);
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::InvalidInput, "GMM covariance lost positive definiteness");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    const double log_det = 2.0 * L.diagonal().array().log().sum();
    const Eigen::MatrixXd centered = (X.rowwise() - comp.mean.transpose()).transpose();
    const Eigen::MatrixXd z = L.triangularView<Eigen::Lower>().solve(centered);
    const double base = std::log(comp.weight) -
                        0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
    logp.col(c) = (base - 0.5 * z.colwise().squaredNorm().array()).transpose();
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
    penalty += 0.5 * cov_reg * inv.trace();
  }
  double nll = 0.0;
  R.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = logp.row(i).maxCoeff();
    const Eigen::RowVectorXd shifted = (logp.row(i).array() - top).exp().matrix();
    const double total = shifted.sum();
    R.row(i) = shifted / total;
    nll -= top + std::log(total);
  }
  return nll + penalty;
}

}  // namespace

GmmModel gmm_em(const Eigen::MatrixXd& X, const std::vector<int>& initial_labels, int k,
                const GmmOptions& opts) {
  const Eigen::Index n = X.rows();
  require(n >= 1, "GMM on empty data");
  require(k >= 1 && k <= n, "GMM needs 1 <= K <= n");
  require(opts.cov_reg > 0.0, "GMM covariance regularization must be positive");
  require(initial_labels.size() == static_cast<std::size_t>(n), "initial label count mismatch");
  require(X.allFinite(), "GMM input contains non-finite values");

  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int l = initial_labels[static_cast<std::size_t>(i)];
    require(l >= 0 && l < k, "initial label out of range");
    R(i, l) = 1.0;
  }
  std::vector<Component> comps(static_cast<std::size_t>(k));
  for (Component& c : comps) {
    c.mean = Eigen::VectorXd::Zero(X.cols());
    c.cov = Eigen::MatrixXd::Identity(X.cols(), X.cols());
  }

  GmmModel model;
  for (int iter = 0; iter < std::max(1, opts.max_iter); ++iter) {
    maximize(X, R, opts.cov_reg, comps);
    const double objective = expect(X, comps, opts.cov_reg, R);
    const double last =
        model.objective_trace.empty() ? std::numeric_limits<double>::infinity() : model.objective_trace.back();
    model.objective_trace.push_back(objective);
    if (last - objective <= opts.tol * std::max(1.0, std::abs(objective))) break;
  }

  model.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index arg = 0;
    R.row(i).maxCoeff(&arg);
    model.labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  for (const Component& c : comps) {
    model.weights.push_back(c.weight);
    model.means.push_back(c.mean);
    model.covariances.push_back(c.cov);
  }
  return model;
}

ClusterAssignment gmm(const Eigen::MatrixXd& X, int k, const GmmOptions& opts) {
  require(k >= 1 && k <= X.rows(), "GMM needs 1 <= K <= n");
  KMeansOptions init;
  init.seed = derive_seed(opts.seed, {"gmm-init"});
  init.n_init = opts.init_n_init;
  const ClusterAssignment start = kmeans(X, k, init);
  GmmModel model = gmm_em(X, start.labels, k, opts);

  ClusterAssignment out;
  out.labels = std::move(model.labels);
  out.k = k;
  out.objective_trace = std::move(model.objective_trace);
  out.seed = opts.seed;
  return out;
}

}  // namespace smc
