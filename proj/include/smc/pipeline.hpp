#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smc/cluster.hpp"
#include "smc/imaging.hpp"
#include "smc/reduce.hpp"
#include "smc/views.hpp"

namespace smc {

// ---------------------------------------------------------------- folds

struct SplitPlan {
  int fold_count = 5;
  double labeled_fraction = 0.8;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
  /// Per fold, ascending. test[f] is the unlabeled part, train[f] its complement.
  std::vector<std::vector<std::size_t>> test;
  std::vector<std::vector<std::size_t>> train;
};

/// Each class is shuffled and dealt round-robin onto the folds. The dealing
/// position carries over from one class to the next, so fold sizes differ by
/// at most one as well.
SplitPlan stratified_folds(std::span<const int> labels, int fold_count, std::uint64_t seed);

// ------------------------------------------------------ synthetic corpus

/// Texture of the class-specific region. `contrast` scales the whole class
/// signal: the correlated noise field and the brightness ramp.
struct ClassTexture {
  double contrast = 0.1;
  double correlation = 0.5;  // weight of the smoothed noise component, [0, 1]
  double gradient = 0.0;     // ramp slope across the region, in units of contrast
};

struct SyntheticSpec {
  int n_per_class = 20;
  int image_size = 32;
  std::uint64_t seed = 0;
  std::vector<ClassTexture> classes = {{0.04, 0.2, 0.0}, {0.08, 0.5, 0.5}, {0.12, 0.8, 1.0}};
  /// Strength of the class-independent variation: blob position and size
  /// jitter, a random illumination ramp and a random bright spot.
  double nuisance = 0.0;
  /// Class-independent white pixel noise (standard deviation).
  double noise = 0.01;
};

struct SyntheticCorpus {
  std::vector<GrayImage> images;
  std::vector<int> labels;
  std::vector<std::string> sample_ids;
};

/// Phantom ROIs in [0, 1]: a soft background blob with a textured square in
/// the middle. Samples are grouped by class.
SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

// ---------------------------------------------------------------- config

enum class DataKind { Synthetic, Images, Views };

struct DataSource {
  DataKind kind = DataKind::Synthetic;
  SyntheticSpec synthetic;
  bool synthetic_seed_set = false;
  std::filesystem::path image_dir;
  std::filesystem::path labels_csv;
  std::filesystem::path manifest;
  PreprocessOptions preprocess;
};

enum class ClusterScope { HeldOut, All };

struct ExperimentConfig {
  std::uint64_t master_seed = 0;
  DataSource data;
  ViewConfig features;
  int components = 0;  // reduced dimension; 0 means class_count - 1
  double ridge = 1e-6;
  bool pca_transductive = false;  // fit PCA on every sample instead of the train split
  std::vector<Algorithm> algorithms{std::begin(kSingleViewAlgorithms),
                                    std::end(kSingleViewAlgorithms)};
  bool multi_view = true;
  AlgorithmOptions options;
  RmkmcOptions rmkmc;
  int clusters = 0;  // K; 0 means class_count
  int fold_count = 5;
  double labeled_fraction = 0.8;
  std::optional<std::uint64_t> split_seed;
  ClusterScope scope = ClusterScope::HeldOut;
  std::filesystem::path output_dir = "out";

  /// The configuration exactly as supplied, echoed into reports.
  nlohmann::json echo = nlohmann::json::object();
  std::string echo_text;
};

/// Parses the documented key schema; unknown keys are rejected. Relative
/// paths are resolved against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Effective configuration with every default filled in.
nlohmann::json to_json(const ExperimentConfig& config);

/// Structural checks that do not need the data.
void validate(const ExperimentConfig& config);

/// Loads or synthesizes the seven-view dataset named by the config.
MultiViewDataset load_dataset(const ExperimentConfig& config);

/// Synthetic spec with the corpus seed derived from the master seed when the
/// config leaves it unset.
SyntheticSpec resolved_synthetic_spec(const ExperimentConfig& config);

// ---------------------------------------------------------------- report

enum class Metric { Acc, FM, Rand };

inline constexpr Metric kMetrics[] = {Metric::Acc, Metric::FM, Metric::Rand};

std::string to_string(Metric m);

struct FoldValues {
  std::vector<double> acc;
  std::vector<double> fm;
  std::vector<double> rand;

  const std::vector<double>& of(Metric m) const;
  std::vector<double>& of(Metric m);
};

struct ReportCell {
  std::string view;       // view name, or "multi-view"
  std::string algorithm;  // display name
  FoldValues folds;
};

struct FoldDiagnostics {
  std::size_t train_size = 0;
  std::size_t cluster_size = 0;
  std::vector<std::string> reduced_hashes;      // per view, matrix handed to single-view algorithms
  std::vector<std::string> multi_view_hashes;   // per view, matrix handed to RMKMC
  std::vector<double> alpha;                    // RMKMC view weights
};

struct EvalReport {
  std::string framework;  // "SMC" or "UCP"
  ReductionKind reduction = ReductionKind::LDA;
  int fold_count = 0;
  int clusters = 0;
  int components = 0;
  std::vector<std::string> views;
  std::vector<std::string> algorithms;
  std::vector<ReportCell> cells;  // view-major
  std::optional<ReportCell> multi_view;
  std::vector<FoldDiagnostics> diagnostics;
  nlohmann::json config = nlohmann::json::object();
  std::string config_text;

  const ReportCell& cell(const std::string& view, const std::string& algorithm) const;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

Summary summarize(std::span<const double> values);
Summary cell_summary(const ReportCell& cell, Metric m);
/// Pooled fold values of one view across algorithms, optionally with RMKMC.
Summary view_average(const EvalReport& r, const std::string& view, Metric m, bool with_multi_view);
/// Pooled fold values of one algorithm across views.
Summary algorithm_average(const EvalReport& r, const std::string& algorithm, Metric m);
/// Pooled fold values of every single-view cell.
Summary overall_average(const EvalReport& r, Metric m);

nlohmann::json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

/// "63.0±13.4" for Acc (percent), "0.50±0.10" for FM and Rand.
std::string format_cell(const Summary& s, Metric m);

/// Table with views as rows plus an Average row, algorithms as columns plus
/// Average and RMKMC columns.
std::string table_csv(const EvalReport& r, Metric m);

struct ReportFormats {
  bool csv = true;
  bool json = true;
  bool svg = true;
};

/// Writes tables, the JSON dump and the comparison charts into `dir`.
/// `baseline` adds a second series to the charts. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir,
                                               const EvalReport& report,
                                               const EvalReport* baseline = nullptr,
                                               const ReportFormats& formats = {});

/// Grouped bar chart; one bar per series in each group.
struct BarSeries {
  std::string name;
  std::vector<Summary> values;
};
std::string grouped_bar_svg(const std::string& title, const std::vector<std::string>& groups,
                            const std::vector<BarSeries>& series, Metric m);

// ---------------------------------------------------------------- runner

enum class AccessPurpose { Fit, Transform, Evaluate };

/// One read of dataset rows by the runner.
struct AccessRecord {
  int fold = 0;
  std::string what;  // view name or "labels"
  AccessPurpose purpose = AccessPurpose::Fit;
  std::vector<std::size_t> rows;
};

struct RunHooks {
  std::function<void(const AccessRecord&)> on_access;
};

EvalReport run_experiment(const MultiViewDataset& data, const ExperimentConfig& config,
                          ReductionKind reduction, const RunHooks& hooks = {});

/// LDA fit on each fold's labeled split, clustering on the reduced unlabeled split.
EvalReport run_smc(const ExperimentConfig& config, const RunHooks& hooks = {});
EvalReport run_smc(const MultiViewDataset& data, const ExperimentConfig& config,
                   const RunHooks& hooks = {});

/// Same flow with PCA in place of LDA.
EvalReport run_ucp(const ExperimentConfig& config, const RunHooks& hooks = {});
EvalReport run_ucp(const MultiViewDataset& data, const ExperimentConfig& config,
                   const RunHooks& hooks = {});

}  // namespace smc
