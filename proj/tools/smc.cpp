// Command-line front end: every subcommand reads an optional JSON config,
// applies flag overrides and writes its results under --output.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "smc/error.hpp"
#include "smc/io.hpp"
#include "smc/metrics.hpp"
#include "smc/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code(smc::ErrorCode code) {
  switch (code) {
    case smc::ErrorCode::InvalidInput: return 2;
    case smc::ErrorCode::EmptyRoi: return 3;
    case smc::ErrorCode::EmptyGlcm: return 4;
    case smc::ErrorCode::DegenerateClass: return 5;
    case smc::ErrorCode::TooFewSubclusters: return 6;
    case smc::ErrorCode::IoError: return 7;
  }
  return 70;
}

void print_error(const std::string& code, const std::string& message) {
  const json err = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << err.dump() << std::endl;
}

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string output;
  long long seed = -1;
};

void add_common(CLI::App* app, Common& c, bool output_required = true) {
  app->add_option("-c,--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--set", c.sets, "Override a config key, e.g. --set clustering.k=3 (repeatable)");
  auto* out = app->add_option("-o,--output", c.output, "Output directory or file");
  if (output_required) out->required();
  app->add_option("--seed", c.seed, "Master seed");
}

// Applies "a.b.c=value"; the value is parsed as JSON when possible.
void apply_set(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  smc::require(eq != std::string::npos && eq > 0, "--set expects key.path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    smc::require(!key.empty(), "empty key in --set path '" + path + "'");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

// Loads the config file (or an empty one), applies --set and flag overrides.
smc::ExperimentConfig resolve_config(const Common& c, json overrides = json::object()) {
  json j = json::object();
  std::string text;
  fs::path base;
  if (!c.config_path.empty()) {
    text = smc::read_text_file(c.config_path);
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      smc::fail(smc::ErrorCode::InvalidInput, "config is not valid JSON: " + std::string(e.what()));
    }
    base = fs::path(c.config_path).parent_path();
  }
  for (const auto& s : c.sets) apply_set(j, s);
  if (c.seed >= 0) j["seed"] = static_cast<std::uint64_t>(c.seed);
  for (const auto& item : overrides.items()) apply_set(j, item.key() + "=" + item.value().dump());
  smc::ExperimentConfig cfg = smc::parse_config(j, base);
  cfg.echo_text = text;
  return cfg;
}

json config_echo(const smc::ExperimentConfig& cfg) {
  return {{"config", cfg.echo}, {"config_text", cfg.echo_text}};
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

std::vector<fs::path> image_files(const fs::path& input) {
  std::vector<fs::path> files;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input)) {
      std::string ext = entry.path().extension().string();
      for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (entry.is_regular_file() && (ext == ".png" || ext == ".pgm")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(input)) {
    files.push_back(input);
  } else {
    smc::fail(smc::ErrorCode::IoError, "input " + input.string() + " does not exist");
  }
  return files;
}

// ---------------------------------------------------------------- commands

int cmd_preprocess(const Common& c, const std::string& input, const std::string& roi, int radius) {
  json overrides = json::object();
  if (!roi.empty()) overrides["data.preprocess.roi"] = roi;
  if (radius >= 0) overrides["data.preprocess.median_radius"] = radius;
  const smc::ExperimentConfig cfg = resolve_config(c, overrides);
  const fs::path out_dir = c.output;
  fs::create_directories(out_dir);
  json images = json::array();
  for (const fs::path& file : image_files(input)) {
    const smc::GrayImage img = smc::preprocess(smc::read_raster(file), cfg.data.preprocess);
    const fs::path out = out_dir / (file.stem().string() + ".pgm");
    smc::write_pgm(out, img);
    images.push_back({{"input", file.string()}, {"output", out.string()}, {"width", img.width()}, {"height", img.height()}});
  }
  json summary = config_echo(cfg);
  summary["images"] = images;
  emit(summary);
  return 0;
}

int cmd_synth(const Common& c) {
  const smc::ExperimentConfig cfg = resolve_config(c, {{"data.source", "synthetic"}});
  const smc::SyntheticSpec spec = smc::resolved_synthetic_spec(cfg);
  const smc::SyntheticCorpus corpus = smc::generate_synthetic_corpus(spec);
  const fs::path out_dir = c.output;
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < corpus.images.size(); ++i) {
    smc::write_pgm(out_dir / (corpus.sample_ids[i] + ".pgm"), corpus.images[i]);
  }
  smc::write_labels_csv(out_dir / "labels.csv", corpus.sample_ids, corpus.labels);
  json summary = config_echo(cfg);
  summary["images"] = corpus.images.size();
  summary["labels"] = (out_dir / "labels.csv").string();
  summary["corpus_seed"] = spec.seed;
  emit(summary);
  return 0;
}

int cmd_extract(const Common& c, const std::string& images, const std::string& labels) {
  json overrides = json::object();
  if (!images.empty()) {
    overrides["data.source"] = "images";
    overrides["data.image_dir"] = fs::absolute(images).string();
  }
  if (!labels.empty()) overrides["data.labels"] = fs::absolute(labels).string();
  const smc::ExperimentConfig cfg = resolve_config(c, overrides);
  const smc::MultiViewDataset data = smc::load_dataset(cfg);
  smc::write_dataset(c.output, data, cfg.echo);
  json summary = config_echo(cfg);
  summary["manifest"] = (fs::path(c.output) / "manifest.json").string();
  summary["samples"] = data.sample_count();
  summary["views"] = data.view_count();
  emit(summary);
  return 0;
}

int cmd_reduce(const Common& c, const std::string& manifest, const std::string& method,
               const std::string& train_csv, int components, double ridge) {
  const smc::ExperimentConfig cfg = resolve_config(c);
  const smc::MultiViewDataset data = smc::read_dataset(manifest);
  const smc::ReductionKind kind = smc::parse_reduction_kind(method);

  // Fit rows: the samples named in --train (with their labels), else every sample.
  std::vector<std::size_t> fit_rows;
  std::vector<int> fit_labels;
  if (!train_csv.empty()) {
    const smc::LabelTable train = smc::read_labels_csv(train_csv);
    std::map<std::string, std::size_t> where;
    for (std::size_t i = 0; i < data.sample_count(); ++i) where[data.sample_ids()[i]] = i;
    for (std::size_t i = 0; i < train.sample_ids.size(); ++i) {
      const auto it = where.find(train.sample_ids[i]);
      smc::require(it != where.end(), "training sample '" + train.sample_ids[i] + "' is not in the manifest");
      fit_rows.push_back(it->second);
      fit_labels.push_back(train.labels[i]);
    }
  } else {
    for (std::size_t i = 0; i < data.sample_count(); ++i) fit_rows.push_back(i);
    if (data.labeled()) fit_labels = *data.labels();
  }
  smc::require(kind == smc::ReductionKind::PCA || fit_labels.size() == fit_rows.size(),
               "LDA needs labels: pass --train or a labeled manifest");

  const int k = components > 0 ? components : (cfg.components > 0 ? cfg.components : 0);
  const double rho = ridge >= 0.0 ? ridge : cfg.ridge;
  std::vector<smc::FeatureView> reduced;
  const fs::path out_dir = c.output;
  fs::create_directories(out_dir / "models");
  for (const smc::FeatureView& v : data.views()) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(fit_rows.size()), v.matrix.cols());
    for (std::size_t r = 0; r < fit_rows.size(); ++r) {
      X.row(static_cast<Eigen::Index>(r)) = v.matrix.row(static_cast<Eigen::Index>(fit_rows[r]));
    }
    smc::ProjectionModel model;
    if (kind == smc::ReductionKind::LDA) {
      int classes = 0;
      for (int l : fit_labels) classes = std::max(classes, l + 1);
      model = smc::lda_fit(X, fit_labels, k > 0 ? k : classes - 1, rho);
    } else {
      const int kk = k > 0 ? k : std::max(1, data.class_count() - 1);
      model = smc::pca_fit(X, kk);
    }
    smc::write_text_file(out_dir / "models" / (v.name + ".json"), smc::to_json(model).dump(2) + "\n");
    reduced.push_back({v.name, smc::transform(model, v.matrix)});
  }
  const smc::MultiViewDataset out(std::move(reduced), data.sample_ids(), data.labels());
  smc::write_dataset(out_dir, out, cfg.echo);
  json summary = config_echo(cfg);
  summary["manifest"] = (out_dir / "manifest.json").string();
  summary["method"] = smc::to_string(kind);
  summary["fit_samples"] = fit_rows.size();
  emit(summary);
  return 0;
}

int cmd_cluster(const Common& c, const std::string& manifest, const std::string& algorithm,
                const std::string& view, int k) {
  smc::ExperimentConfig cfg = resolve_config(c);
  const smc::MultiViewDataset data = smc::read_dataset(manifest);
  const int clusters = k > 0 ? k : (cfg.clusters > 0 ? cfg.clusters : data.class_count());
  smc::require(clusters >= 2, "cluster count K must be at least 2 (pass --k)");
  const fs::path out_dir = c.output;
  fs::create_directories(out_dir);
  json results = json::array();

  if (algorithm == "rmkmc") {
    std::vector<Eigen::MatrixXd> views;
    for (const auto& v : data.views()) views.push_back(v.matrix);
    smc::RmkmcOptions opts = cfg.rmkmc;
    opts.seed = cfg.master_seed;
    const smc::RmkmcResult r = smc::rmkmc(views, clusters, opts);
    const fs::path file = out_dir / "multi-view.rmkmc.csv";
    smc::write_labels_csv(file, data.sample_ids(), r.assignment.labels);
    results.push_back({{"view", "multi-view"},
                       {"algorithm", "RMKMC"},
                       {"labels", file.string()},
                       {"alpha", r.alpha},
                       {"objective_trace", r.assignment.objective_trace}});
  } else {
    const smc::Algorithm a = smc::parse_algorithm(algorithm);
    for (const auto& v : data.views()) {
      if (!view.empty() && v.name != view) continue;
      const smc::ClusterAssignment r = smc::run_algorithm(a, v.matrix, clusters, cfg.options, cfg.master_seed);
      const fs::path file = out_dir / (v.name + "." + smc::key_name(a) + ".csv");
      smc::write_labels_csv(file, data.sample_ids(), r.labels);
      results.push_back({{"view", v.name},
                         {"algorithm", smc::display_name(a)},
                         {"labels", file.string()},
                         {"objective_trace", r.objective_trace}});
    }
    smc::require(!results.empty(), "no view named '" + view + "' in the manifest");
  }
  json summary = config_echo(cfg);
  summary["k"] = clusters;
  summary["results"] = results;
  smc::write_text_file(out_dir / "cluster.json", summary.dump(2) + "\n");
  emit(summary);
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& truth_csv, const std::vector<std::string>& preds) {
  const smc::ExperimentConfig cfg = resolve_config(c);
  const smc::LabelTable truth = smc::read_labels_csv(truth_csv);
  json rows = json::array();
  for (const std::string& p : preds) {
    const smc::LabelTable pred = smc::read_labels_csv(p);
    const std::vector<int> y = smc::labels_for(truth, pred.sample_ids);
    const smc::ContingencyTable t = smc::contingency(y, pred.labels);
    rows.push_back({{"prediction", p},
                    {"n", t.n},
                    {"Acc", smc::accuracy(t).value},
                    {"FM", smc::fmi(t).value},
                    {"RI", smc::rand_index(t).value},
                    {"Rand", smc::ari(t).value}});
  }
  json summary = config_echo(cfg);
  summary["metrics"] = rows;
  if (!c.output.empty()) smc::write_text_file(c.output, summary.dump(2) + "\n");
  emit(summary);
  return 0;
}

int cmd_run(const Common& c, bool smc_framework, bool compare) {
  const smc::ExperimentConfig cfg = resolve_config(c, {{"output.dir", fs::absolute(c.output).string()}});
  const smc::MultiViewDataset data = smc::load_dataset(cfg);
  const smc::EvalReport primary = smc_framework ? smc::run_smc(data, cfg) : smc::run_ucp(data, cfg);
  std::optional<smc::EvalReport> other;
  if (compare) other = smc_framework ? smc::run_ucp(data, cfg) : smc::run_smc(data, cfg);
  const auto files = smc::emit_report(cfg.output_dir, primary, other ? &*other : nullptr);
  json summary = {{"framework", primary.framework}, {"files", json::array()}};
  for (const auto& f : files) summary["files"].push_back(f.string());
  for (smc::Metric m : smc::kMetrics) {
    const std::string key = smc::to_string(m);
    summary["overall"][key] = smc::format_cell(smc::overall_average(primary, m), m);
    if (primary.multi_view) summary["RMKMC"][key] = smc::format_cell(smc::cell_summary(*primary.multi_view, m), m);
  }
  emit(summary);
  return 0;
}

int cmd_report(const Common& c, const std::vector<std::string>& inputs) {
  smc::require(!inputs.empty() && inputs.size() <= 2, "report takes one or two report JSON files");
  const smc::EvalReport first = smc::report_from_json(smc::read_json_file(inputs[0]));
  std::optional<smc::EvalReport> second;
  if (inputs.size() == 2) second = smc::report_from_json(smc::read_json_file(inputs[1]));
  const auto files = smc::emit_report(c.output, first, second ? &*second : nullptr);
  json summary = {{"files", json::array()}, {"config", first.config}, {"config_text", first.config_text}};
  for (const auto& f : files) summary["files"].push_back(f.string());
  emit(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised multi-view clustering toolkit"};
  app.require_subcommand(1);

  Common pre_c, synth_c, extract_c, reduce_c, cluster_c, eval_c, smc_c, ucp_c, report_c;

  std::string pre_input, pre_roi;
  int pre_radius = -1;
  auto* pre = app.add_subcommand("preprocess", "Grayscale, denoise, normalize and crop images to PGM");
  add_common(pre, pre_c);
  pre->add_option("-i,--input", pre_input, "Image file or directory")->required();
  pre->add_option("--roi", pre_roi, "ROI spec: auto:<threshold> or rect:x0,y0,w,h");
  pre->add_option("--median-radius", pre_radius, "Median filter radius");

  auto* synth = app.add_subcommand("synth", "Write a synthetic phantom corpus and labels.csv");
  add_common(synth, synth_c);

  std::string ex_images, ex_labels;
  auto* extract = app.add_subcommand("extract", "Compute the seven feature views");
  add_common(extract, extract_c);
  extract->add_option("--images", ex_images, "Image directory (switches the source to images)");
  extract->add_option("--labels", ex_labels, "Labels CSV (sample_id,label)");

  std::string red_manifest, red_method = "lda", red_train;
  int red_k = 0;
  double red_ridge = -1.0;
  auto* reduce = app.add_subcommand("reduce", "Fit LDA or PCA per view and transform every sample");
  add_common(reduce, reduce_c);
  reduce->add_option("-m,--manifest", red_manifest, "View manifest from extract")->required()->check(CLI::ExistingFile);
  reduce->add_option("--method", red_method, "lda or pca");
  reduce->add_option("--train", red_train, "Labels CSV naming the fit samples")->check(CLI::ExistingFile);
  reduce->add_option("-k,--components", red_k, "Output dimension (default C-1)");
  reduce->add_option("--ridge", red_ridge, "LDA ridge");

  std::string cl_manifest, cl_algo = "kmeans", cl_view;
  int cl_k = 0;
  auto* cluster = app.add_subcommand("cluster", "Cluster one view, every view, or all views jointly");
  add_common(cluster, cluster_c);
  cluster->add_option("-m,--manifest", cl_manifest, "View manifest")->required()->check(CLI::ExistingFile);
  cluster->add_option("-a,--algorithm", cl_algo, "gmm, kmeans, kmedoids, ac, birch, sc or rmkmc");
  cluster->add_option("--view", cl_view, "Only this view");
  cluster->add_option("-k,--k", cl_k, "Cluster count");

  std::string ev_truth;
  std::vector<std::string> ev_pred;
  auto* evaluate = app.add_subcommand("evaluate", "Score predicted labels against ground truth");
  add_common(evaluate, eval_c, false);
  evaluate->add_option("-t,--truth", ev_truth, "Ground-truth labels CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("-p,--pred", ev_pred, "Predicted labels CSV (repeatable)")->required()->check(CLI::ExistingFile);

  bool smc_compare = false, ucp_compare = false;
  auto* run_smc = app.add_subcommand("run-smc", "Cross-validated LDA + clustering benchmark");
  add_common(run_smc, smc_c);
  run_smc->add_flag("--compare", smc_compare, "Also run the PCA baseline and chart both");
  auto* run_ucp = app.add_subcommand("run-ucp", "Cross-validated PCA + clustering benchmark");
  add_common(run_ucp, ucp_c);
  run_ucp->add_flag("--compare", ucp_compare, "Also run the LDA framework and chart both");

  std::vector<std::string> rep_inputs;
  auto* report = app.add_subcommand("report", "Re-emit tables and charts from report JSON files");
  add_common(report, report_c);
  report->add_option("-i,--input", rep_inputs, "One or two *_report.json files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("Usage", e.what());
    return 64;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(pre_c, pre_input, pre_roi, pre_radius);
    if (synth->parsed()) return cmd_synth(synth_c);
    if (extract->parsed()) return cmd_extract(extract_c, ex_images, ex_labels);
    if (reduce->parsed()) return cmd_reduce(reduce_c, red_manifest, red_method, red_train, red_k, red_ridge);
    if (cluster->parsed()) return cmd_cluster(cluster_c, cl_manifest, cl_algo, cl_view, cl_k);
    if (evaluate->parsed()) return cmd_evaluate(eval_c, ev_truth, ev_pred);
    if (run_smc->parsed()) return cmd_run(smc_c, true, smc_compare);
    if (run_ucp->parsed()) return cmd_run(ucp_c, false, ucp_compare);
    if (report->parsed()) return cmd_report(report_c, rep_inputs);
  } catch (const smc::Error& e) {
    print_error(std::string(smc::to_string(e.code())), e.what());
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    print_error("IoError", e.what());
    return exit_code(smc::ErrorCode::IoError);
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return 70;
  }
  return 0;
}
