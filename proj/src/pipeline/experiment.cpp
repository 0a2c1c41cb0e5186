#include <string>

#include "smc/error.hpp"
#include "smc/io.hpp"
#include "smc/metrics.hpp"
#include "smc/pipeline.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

// Every row the runner reads goes through here so tests can audit it.
class DataAccessor {
 public:
  DataAccessor(const MultiViewDataset& data, const RunHooks& hooks, int fold)
      : data_(data), hooks_(hooks), fold_(fold) {}

  Eigen::MatrixXd rows(std::size_t view, const std::vector<std::size_t>& idx, AccessPurpose why) const {
    const FeatureView& v = data_.view(view);
    record(v.name, idx, why);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), v.matrix.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      out.row(static_cast<Eigen::Index>(r)) = v.matrix.row(static_cast<Eigen::Index>(idx[r]));
    }
    return out;
  }

  std::vector<int> labels(const std::vector<std::size_t>& idx, AccessPurpose why) const {
    record("labels", idx, why);
    const std::vector<int>& all = *data_.labels();
    std::vector<int> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(all[i]);
    return out;
  }

 private:
  void record(const std::string& what, const std::vector<std::size_t>& idx, AccessPurpose why) const {
    if (hooks_.on_access) hooks_.on_access(AccessRecord{fold_, what, why, idx});
  }

  const MultiViewDataset& data_;
  const RunHooks& hooks_;
  int fold_;
};

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

void push_metrics(FoldValues& fv, const std::vector<int>& truth, const std::vector<int>& pred) {
  const ContingencyTable t = contingency(truth, pred);
  fv.acc.push_back(accuracy(t).value);
  fv.fm.push_back(fmi(t).value);
  fv.rand.push_back(ari(t).value);
}

[[noreturn]] void rethrow_in_fold(const Error& e, int fold, const std::string& where) {
  throw Error(e.code(), "fold " + std::to_string(fold) + ", " + where + ": " + e.what());
}

}  // namespace

EvalReport run_experiment(const MultiViewDataset& data, const ExperimentConfig& config,
                          ReductionKind reduction, const RunHooks& hooks) {
  validate(config);
  require(data.labeled(), "experiments need a labeled dataset");
  require(data.view_count() >= 1, "dataset has no views");
  const int classes = data.class_count();
  const int k_clusters = config.clusters > 0 ? config.clusters : classes;
  const int components = config.components > 0 ? config.components : classes - 1;
  require(k_clusters >= 2, "cluster count K must be at least 2");
  require(components >= 1, "reduced dimension must be at least 1");

  const std::uint64_t split_seed = config.split_seed.value_or(derive_seed(config.master_seed, {"split"}));
  const SplitPlan plan = stratified_folds(*data.labels(), config.fold_count, split_seed);

  EvalReport report;
  report.framework = reduction == ReductionKind::LDA ? "SMC" : "UCP";
  report.reduction = reduction;
  report.fold_count = plan.fold_count;
  report.clusters = k_clusters;
  report.components = components;
  for (const FeatureView& v : data.views()) report.views.push_back(v.name);
  for (Algorithm a : config.algorithms) report.algorithms.push_back(display_name(a));
  for (const std::string& v : report.views) {
    for (const std::string& a : report.algorithms) report.cells.push_back({v, a, {}});
  }
  if (config.multi_view) report.multi_view = ReportCell{"multi-view", "RMKMC", {}};
  report.config = config.echo;
  report.config_text = config.echo_text;

  for (int f = 0; f < plan.fold_count; ++f) {
    const auto fs = static_cast<std::size_t>(f);
    const DataAccessor access(data, hooks, f);
    const std::vector<std::size_t>& train = plan.train[fs];
    const std::vector<std::size_t> cluster_rows =
        config.scope == ClusterScope::HeldOut ? plan.test[fs] : all_rows(data.sample_count());

    FoldDiagnostics diag;
    diag.train_size = train.size();
    diag.cluster_size = cluster_rows.size();

    std::vector<Eigen::MatrixXd> reduced;
    for (std::size_t v = 0; v < data.view_count(); ++v) {
      const std::string& name = report.views[v];
      try {
        ProjectionModel model;
        if (reduction == ReductionKind::LDA) {
          const Eigen::MatrixXd X = access.rows(v, train, AccessPurpose::Fit);
          const std::vector<int> y = access.labels(train, AccessPurpose::Fit);
          model = lda_fit(X, y, components, config.ridge);
        } else {
          const auto& fit_rows = config.pca_transductive ? all_rows(data.sample_count()) : train;
          model = pca_fit(access.rows(v, fit_rows, AccessPurpose::Fit), components);
        }
        reduced.push_back(transform(model, access.rows(v, cluster_rows, AccessPurpose::Transform)));
      } catch (const Error& e) {
        rethrow_in_fold(e, f, "view " + name + " reduction");
      }
      diag.reduced_hashes.push_back(matrix_hash(reduced.back()));
    }

    const std::vector<int> truth = access.labels(cluster_rows, AccessPurpose::Evaluate);
    std::size_t cell = 0;
    for (std::size_t v = 0; v < reduced.size(); ++v) {
      for (Algorithm a : config.algorithms) {
        const std::uint64_t seed = derive_seed(
            config.master_seed, {"fold", std::to_string(f), "view", report.views[v], key_name(a)});
        try {
          const ClusterAssignment result = run_algorithm(a, reduced[v], k_clusters, config.options, seed);
          push_metrics(report.cells[cell].folds, truth, result.labels);
        } catch (const Error& e) {
          rethrow_in_fold(e, f, "view " + report.views[v] + ", " + display_name(a));
        }
        ++cell;
      }
    }

    if (report.multi_view) {
      for (const Eigen::MatrixXd& w : reduced) diag.multi_view_hashes.push_back(matrix_hash(w));
      RmkmcOptions opts = config.rmkmc;
      opts.seed = derive_seed(config.master_seed, {"fold", std::to_string(f), "rmkmc"});
      try {
        const RmkmcResult result = rmkmc(reduced, k_clusters, opts);
        push_metrics(report.multi_view->folds, truth, result.assignment.labels);
        diag.alpha = result.alpha;
      } catch (const Error& e) {
        rethrow_in_fold(e, f, "RMKMC");
      }
    }
    report.diagnostics.push_back(std::move(diag));
  }
  return report;
}

EvalReport run_smc(const MultiViewDataset& data, const ExperimentConfig& config, const RunHooks& hooks) {
  return run_experiment(data, config, ReductionKind::LDA, hooks);
}

EvalReport run_smc(const ExperimentConfig& config, const RunHooks& hooks) {
  return run_smc(load_dataset(config), config, hooks);
}

EvalReport run_ucp(const MultiViewDataset& data, const ExperimentConfig& config, const RunHooks& hooks) {
  return run_experiment(data, config, ReductionKind::PCA, hooks);
}

EvalReport run_ucp(const ExperimentConfig& config, const RunHooks& hooks) {
  return run_ucp(load_dataset(config), config, hooks);
}

}  // namespace smc
