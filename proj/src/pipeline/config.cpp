#include <algorithm>
#include <cmath>
#include <set>

#include "smc/error.hpp"
#include "smc/io.hpp"
#include "smc/pipeline.hpp"
#include "smc/random.hpp"

namespace smc {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require(j.is_object(), "'" + where + "' must be an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    require(known, "unknown config key '" + where + "." + item.key() + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::InvalidInput, "config key '" + where + "." + key + "' has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

std::string scope_name(ClusterScope s) { return s == ClusterScope::All ? "all" : "held_out"; }

std::string data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::Synthetic: return "synthetic";
    case DataKind::Images: return "images";
    case DataKind::Views: return "views";
  }
  return "synthetic";
}

void parse_synthetic(const json& j, DataSource& src) {
  check_keys(j, "data.synthetic", {"n_per_class", "image_size", "seed", "classes", "nuisance", "noise"});
  SyntheticSpec& s = src.synthetic;
  read(j, "n_per_class", s.n_per_class, "data.synthetic");
  read(j, "image_size", s.image_size, "data.synthetic");
  read(j, "nuisance", s.nuisance, "data.synthetic");
  read(j, "noise", s.noise, "data.synthetic");
  if (j.contains("seed")) {
    read(j, "seed", s.seed, "data.synthetic");
    src.synthetic_seed_set = true;
  }
  if (j.contains("classes")) {
    require(j["classes"].is_array(), "'data.synthetic.classes' must be an array");
    s.classes.clear();
    for (const json& c : j["classes"]) {
      check_keys(c, "data.synthetic.classes[]", {"contrast", "correlation", "gradient"});
      ClassTexture t;
      read(c, "contrast", t.contrast, "data.synthetic.classes[]");
      read(c, "correlation", t.correlation, "data.synthetic.classes[]");
      read(c, "gradient", t.gradient, "data.synthetic.classes[]");
      s.classes.push_back(t);
    }
  }
}

void parse_data(const json& j, DataSource& src, const std::filesystem::path& base) {
  check_keys(j, "data", {"source", "synthetic", "image_dir", "labels", "manifest", "preprocess"});
  std::string source = "synthetic";
  read(j, "source", source, "data");
  if (source == "synthetic") {
    src.kind = DataKind::Synthetic;
  } else if (source == "images") {
    src.kind = DataKind::Images;
  } else if (source == "views") {
    src.kind = DataKind::Views;
  } else {
    fail(ErrorCode::InvalidInput, "data.source must be synthetic, images or views, got '" + source + "'");
  }
  if (j.contains("synthetic")) parse_synthetic(j["synthetic"], src);
  std::string text;
  if (j.contains("image_dir")) {
    read(j, "image_dir", text, "data");
    src.image_dir = resolve(base, text);
  }
  if (j.contains("labels")) {
    read(j, "labels", text, "data");
    src.labels_csv = resolve(base, text);
  }
  if (j.contains("manifest")) {
    read(j, "manifest", text, "data");
    src.manifest = resolve(base, text);
  }
  if (j.contains("preprocess")) {
    const json& p = j["preprocess"];
    check_keys(p, "data.preprocess", {"median_radius", "roi"});
    read(p, "median_radius", src.preprocess.median_radius, "data.preprocess");
    if (p.contains("roi")) {
      read(p, "roi", text, "data.preprocess");
      src.preprocess.roi = RoiSpec::parse(text);
    }
  }
}

void parse_features(const json& j, ViewConfig& v) {
  check_keys(j, "features", {"window", "stride", "levels", "offsets"});
  read(j, "window", v.window, "features");
  read(j, "stride", v.stride, "features");
  read(j, "levels", v.levels, "features");
  if (j.contains("offsets")) {
    std::vector<std::array<int, 2>> raw;
    read(j, "offsets", raw, "features");
    v.offsets.clear();
    for (const auto& o : raw) v.offsets.push_back({o[0], o[1]});
  }
}

void parse_clustering(const json& j, ExperimentConfig& c) {
  check_keys(j, "clustering", {"k", "algorithms", "multi_view", "scope", "kmeans", "kmedoids", "gmm",
                               "birch", "spectral", "rmkmc"});
  read(j, "k", c.clusters, "clustering");
  read(j, "multi_view", c.multi_view, "clustering");
  if (j.contains("algorithms")) {
    std::vector<std::string> names;
    read(j, "algorithms", names, "clustering");
    c.algorithms.clear();
    for (const auto& n : names) c.algorithms.push_back(parse_algorithm(n));
  }
  if (j.contains("scope")) {
    std::string s;
    read(j, "scope", s, "clustering");
    if (s == "held_out") {
      c.scope = ClusterScope::HeldOut;
    } else if (s == "all") {
      c.scope = ClusterScope::All;
    } else {
      fail(ErrorCode::InvalidInput, "clustering.scope must be held_out or all");
    }
  }
  AlgorithmOptions& o = c.options;
  if (j.contains("kmeans")) {
    check_keys(j["kmeans"], "clustering.kmeans", {"n_init", "max_iter", "tol"});
    read(j["kmeans"], "n_init", o.kmeans.n_init, "clustering.kmeans");
    read(j["kmeans"], "max_iter", o.kmeans.max_iter, "clustering.kmeans");
    read(j["kmeans"], "tol", o.kmeans.tol, "clustering.kmeans");
  }
  if (j.contains("kmedoids")) {
    check_keys(j["kmedoids"], "clustering.kmedoids", {"n_init", "max_iter"});
    read(j["kmedoids"], "n_init", o.kmedoids.n_init, "clustering.kmedoids");
    read(j["kmedoids"], "max_iter", o.kmedoids.max_iter, "clustering.kmedoids");
  }
  if (j.contains("gmm")) {
    check_keys(j["gmm"], "clustering.gmm", {"max_iter", "tol", "cov_reg", "init_n_init"});
    read(j["gmm"], "max_iter", o.gmm.max_iter, "clustering.gmm");
    read(j["gmm"], "tol", o.gmm.tol, "clustering.gmm");
    read(j["gmm"], "cov_reg", o.gmm.cov_reg, "clustering.gmm");
    read(j["gmm"], "init_n_init", o.gmm.init_n_init, "clustering.gmm");
  }
  if (j.contains("birch")) {
    check_keys(j["birch"], "clustering.birch", {"threshold", "branching", "relative"});
    read(j["birch"], "threshold", o.birch.threshold, "clustering.birch");
    read(j["birch"], "branching", o.birch.branching, "clustering.birch");
    read(j["birch"], "relative", o.birch.relative, "clustering.birch");
  }
  if (j.contains("spectral")) {
    check_keys(j["spectral"], "clustering.spectral", {"affinity", "gamma", "n_neighbors", "n_init"});
    if (j["spectral"].contains("affinity")) {
      std::string a;
      read(j["spectral"], "affinity", a, "clustering.spectral");
      if (a == "rbf") {
        o.spectral.affinity = Affinity::Rbf;
      } else if (a == "knn") {
        o.spectral.affinity = Affinity::Knn;
      } else {
        fail(ErrorCode::InvalidInput, "clustering.spectral.affinity must be rbf or knn");
      }
    }
    read(j["spectral"], "gamma", o.spectral.gamma, "clustering.spectral");
    read(j["spectral"], "n_neighbors", o.spectral.n_neighbors, "clustering.spectral");
    read(j["spectral"], "n_init", o.spectral.n_init, "clustering.spectral");
  }
  if (j.contains("rmkmc")) {
    check_keys(j["rmkmc"], "clustering.rmkmc", {"gamma", "max_iter", "tol", "scaling", "init_n_init"});
    read(j["rmkmc"], "gamma", c.rmkmc.gamma, "clustering.rmkmc");
    read(j["rmkmc"], "max_iter", c.rmkmc.max_iter, "clustering.rmkmc");
    read(j["rmkmc"], "tol", c.rmkmc.tol, "clustering.rmkmc");
    if (j["rmkmc"].contains("scaling")) {
      std::string s;
      read(j["rmkmc"], "scaling", s, "clustering.rmkmc");
      c.rmkmc.scaling = parse_view_scaling(s);
    }
    read(j["rmkmc"], "init_n_init", c.rmkmc.init_n_init, "clustering.rmkmc");
  }
}

}  // namespace

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config", {"seed", "data", "features", "reduction", "clustering", "split", "output"});
  ExperimentConfig c;
  c.echo = j;
  read(j, "seed", c.master_seed, "config");
  if (j.contains("data")) parse_data(j["data"], c.data, base_dir);
  if (j.contains("features")) parse_features(j["features"], c.features);
  if (j.contains("reduction")) {
    const json& r = j["reduction"];
    check_keys(r, "reduction", {"components", "ridge", "pca_transductive"});
    read(r, "components", c.components, "reduction");
    read(r, "ridge", c.ridge, "reduction");
    read(r, "pca_transductive", c.pca_transductive, "reduction");
  }
  if (j.contains("clustering")) parse_clustering(j["clustering"], c);
  if (j.contains("split")) {
    const json& s = j["split"];
    check_keys(s, "split", {"fold_count", "labeled_fraction", "seed"});
    read(s, "fold_count", c.fold_count, "split");
    read(s, "labeled_fraction", c.labeled_fraction, "split");
    if (s.contains("seed")) {
      std::uint64_t seed = 0;
      read(s, "seed", seed, "split");
      c.split_seed = seed;
    }
  }
  if (j.contains("output")) {
    check_keys(j["output"], "output", {"dir"});
    std::string dir;
    read(j["output"], "dir", dir, "output");
    c.output_dir = resolve(base_dir, dir);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInput, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  ExperimentConfig c = parse_config(j, path.parent_path());
  c.echo_text = text;
  return c;
}

json to_json(const ExperimentConfig& c) {
  json classes = json::array();
  for (const ClassTexture& t : c.data.synthetic.classes) {
    classes.push_back({{"contrast", t.contrast}, {"correlation", t.correlation}, {"gradient", t.gradient}});
  }
  json offsets = json::array();
  for (const Offset& o : c.features.offsets) offsets.push_back({o.dy, o.dx});
  std::vector<std::string> algos;
  for (Algorithm a : c.algorithms) algos.push_back(key_name(a));
  const SyntheticSpec spec = resolved_synthetic_spec(c);
  json out = {
      {"seed", c.master_seed},
      {"data",
       {{"source", data_kind_name(c.data.kind)},
        {"synthetic",
         {{"n_per_class", spec.n_per_class},
          {"image_size", spec.image_size},
          {"seed", spec.seed},
          {"classes", classes},
          {"nuisance", spec.nuisance},
          {"noise", spec.noise}}},
        {"image_dir", c.data.image_dir.string()},
        {"labels", c.data.labels_csv.string()},
        {"manifest", c.data.manifest.string()},
        {"preprocess",
         {{"median_radius", c.data.preprocess.median_radius}, {"roi", c.data.preprocess.roi.to_string()}}}}},
      {"features",
       {{"window", c.features.window},
        {"stride", c.features.stride},
        {"levels", c.features.levels},
        {"offsets", offsets}}},
      {"reduction",
       {{"components", c.components}, {"ridge", c.ridge}, {"pca_transductive", c.pca_transductive}}},
      {"clustering",
       {{"k", c.clusters},
        {"algorithms", algos},
        {"multi_view", c.multi_view},
        {"scope", scope_name(c.scope)},
        {"kmeans",
         {{"n_init", c.options.kmeans.n_init},
          {"max_iter", c.options.kmeans.max_iter},
          {"tol", c.options.kmeans.tol}}},
        {"kmedoids", {{"n_init", c.options.kmedoids.n_init}, {"max_iter", c.options.kmedoids.max_iter}}},
        {"gmm",
         {{"max_iter", c.options.gmm.max_iter},
          {"tol", c.options.gmm.tol},
          {"cov_reg", c.options.gmm.cov_reg},
          {"init_n_init", c.options.gmm.init_n_init}}},
        {"birch",
         {{"threshold", c.options.birch.threshold},
          {"branching", c.options.birch.branching},
          {"relative", c.options.birch.relative}}},
        {"spectral",
         {{"affinity", c.options.spectral.affinity == Affinity::Knn ? "knn" : "rbf"},
          {"gamma", c.options.spectral.gamma},
          {"n_neighbors", c.options.spectral.n_neighbors},
          {"n_init", c.options.spectral.n_init}}},
        {"rmkmc",
         {{"gamma", c.rmkmc.gamma},
          {"max_iter", c.rmkmc.max_iter},
          {"tol", c.rmkmc.tol},
          {"scaling", to_string(c.rmkmc.scaling)},
          {"init_n_init", c.rmkmc.init_n_init}}}}},
      {"split",
       {{"fold_count", c.fold_count},
        {"labeled_fraction", c.labeled_fraction},
        {"seed", c.split_seed.value_or(derive_seed(c.master_seed, {"split"}))}}},
      {"output", {{"dir", c.output_dir.string()}}}};
  return out;
}

void validate(const ExperimentConfig& c) {
  require(c.clusters == 0 || c.clusters >= 2, "clustering.k must be at least 2");
  require(c.components >= 0, "reduction.components must be non-negative");
  require(c.ridge >= 0.0 && std::isfinite(c.ridge), "reduction.ridge must be non-negative");
  require(!c.algorithms.empty() || c.multi_view, "no clustering algorithm selected");
  require(c.fold_count >= 2, "split.fold_count must be at least 2");
  require(c.labeled_fraction > 0.0 && c.labeled_fraction < 1.0,
          "split.labeled_fraction must lie strictly between 0 and 1");
  const double implied = 1.0 - 1.0 / c.fold_count;
  require(std::abs(c.labeled_fraction - implied) < 1e-9,
          "split.labeled_fraction must equal 1 - 1/fold_count");
  require(c.rmkmc.gamma > 1.0, "clustering.rmkmc.gamma must exceed 1");
  require(c.features.window >= 2 && c.features.stride >= 1 && c.features.levels >= 2,
          "features need window >= 2, stride >= 1, levels >= 2");
  switch (c.data.kind) {
    case DataKind::Synthetic: break;
    case DataKind::Images:
      require(!c.data.image_dir.empty() && !c.data.labels_csv.empty(),
              "image source needs data.image_dir and data.labels");
      break;
    case DataKind::Views:
      require(!c.data.manifest.empty(), "view source needs data.manifest");
      break;
  }
}

SyntheticSpec resolved_synthetic_spec(const ExperimentConfig& c) {
  SyntheticSpec s = c.data.synthetic;
  if (!c.data.synthetic_seed_set) s.seed = derive_seed(c.master_seed, {"corpus"});
  return s;
}

namespace {

std::filesystem::path find_image(const std::filesystem::path& dir, const std::string& id) {
  const std::filesystem::path direct = dir / id;
  if (std::filesystem::is_regular_file(direct)) return direct;
  for (const char* ext : {".png", ".pgm", ".PNG", ".PGM"}) {
    std::filesystem::path p = dir / (id + ext);
    if (std::filesystem::is_regular_file(p)) return p;
  }
  fail(ErrorCode::IoError, "no image for sample '" + id + "' in " + dir.string());
}

}  // namespace

MultiViewDataset load_dataset(const ExperimentConfig& c) {
  validate(c);
  switch (c.data.kind) {
    case DataKind::Synthetic: {
      const SyntheticCorpus corpus = generate_synthetic_corpus(resolved_synthetic_spec(c));
      return build_dataset(corpus.images, corpus.labels, c.features, corpus.sample_ids);
    }
    case DataKind::Images: {
      if (!std::filesystem::is_directory(c.data.image_dir)) {
        fail(ErrorCode::IoError, "image directory " + c.data.image_dir.string() + " does not exist");
      }
      const LabelTable table = read_labels_csv(c.data.labels_csv);
      std::vector<GrayImage> images;
      for (const std::string& id : table.sample_ids) {
        images.push_back(preprocess(read_raster(find_image(c.data.image_dir, id)), c.data.preprocess));
      }
      return build_dataset(images, table.labels, c.features, table.sample_ids);
    }
    case DataKind::Views:
      return read_dataset(c.data.manifest, c.data.labels_csv);
  }
  fail(ErrorCode::InvalidInput, "unknown data source");
}

}  // namespace smc
