#include "smc/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "smc/error.hpp"

namespace smc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

double parse_double(const std::string& text, const std::filesystem::path& path) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::IoError, "non-numeric value '" + text + "' in " + path.string());
  }
  if (used != text.size()) fail(ErrorCode::IoError, "non-numeric value '" + text + "' in " + path.string());
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LabelTable read_labels_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  LabelTable table;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (header) {
      header = false;
      if (fields.size() >= 2 && fields[0] == "sample_id") continue;
    }
    if (fields.size() != 2) fail(ErrorCode::IoError, "label rows need sample_id,label in " + path.string());
    table.sample_ids.push_back(fields[0]);
    table.labels.push_back(static_cast<int>(parse_double(fields[1], path)));
  }
  return table;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                      const std::vector<int>& labels) {
  require(ids.size() == labels.size(), "label count does not match id count");
  auto out = open_out(path);
  out << "sample_id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] << '\n';
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<int> labels_for(const LabelTable& table, const std::vector<std::string>& ids) {
  std::map<std::string, int> lookup;
  for (std::size_t i = 0; i < table.sample_ids.size(); ++i) lookup[table.sample_ids[i]] = table.labels[i];
  std::vector<int> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = lookup.find(id);
    require(it != lookup.end(), "no label for sample '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

NamedMatrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::IoError, "empty matrix file " + path.string());
  const auto header = split_csv_line(line);
  if (header.size() != 2) fail(ErrorCode::IoError, "matrix header must be '<name>,<d>' in " + path.string());
  NamedMatrix out;
  out.name = header[0];
  const auto d = static_cast<Eigen::Index>(parse_double(header[1], path));
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != d + 1) {
      fail(ErrorCode::IoError, "matrix row width does not match d in " + path.string());
    }
    out.sample_ids.push_back(fields[0]);
    std::vector<double> row(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = parse_double(fields[static_cast<std::size_t>(j + 1)], path);
    rows.push_back(std::move(row));
  }
  out.matrix.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out.matrix(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  }
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const std::string& name,
                      const std::vector<std::string>& ids, const Eigen::MatrixXd& matrix) {
  require(static_cast<Eigen::Index>(ids.size()) == matrix.rows(), "sample id count does not match matrix rows");
  auto out = open_out(path);
  out << name << ',' << matrix.cols() << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out << ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << ',' << format_double(matrix(i, j));
    out << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

void write_dataset(const std::filesystem::path& dir, const MultiViewDataset& data,
                   const nlohmann::json& config_echo) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  nlohmann::json manifest;
  manifest["n"] = data.sample_count();
  manifest["M"] = data.view_count();
  manifest["sample_ids"] = data.sample_ids();
  nlohmann::json views = nlohmann::json::array();
  for (const FeatureView& v : data.views()) {
    const std::string file = v.name + ".csv";
    write_matrix_csv(dir / file, v.name, data.sample_ids(), v.matrix);
    views.push_back({{"name", v.name}, {"d", v.matrix.cols()}, {"file", file}});
  }
  manifest["views"] = std::move(views);
  if (data.labeled()) {
    write_labels_csv(dir / "labels.csv", data.sample_ids(), *data.labels());
    manifest["labels"] = "labels.csv";
  }
  manifest["config"] = config_echo;
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

MultiViewDataset read_dataset(const std::filesystem::path& manifest_path,
                              const std::filesystem::path& labels_csv) {
  const nlohmann::json manifest = read_json_file(manifest_path);
  const auto base = manifest_path.parent_path();
  try {
    std::vector<FeatureView> views;
    std::vector<std::string> ids;
    for (const auto& entry : manifest.at("views")) {
      NamedMatrix m = read_matrix_csv(base / entry.at("file").get<std::string>());
      if (ids.empty()) {
        ids = m.sample_ids;
      } else {
        require(m.sample_ids == ids, "view files disagree on sample order");
      }
      require(m.matrix.cols() == entry.at("d").get<Eigen::Index>(), "view width does not match manifest");
      views.push_back({entry.at("name").get<std::string>(), std::move(m.matrix)});
    }
    std::optional<std::vector<int>> labels;
    std::filesystem::path label_path = labels_csv;
    if (label_path.empty() && manifest.contains("labels")) label_path = base / manifest["labels"].get<std::string>();
    if (!label_path.empty()) labels = labels_for(read_labels_csv(label_path), ids);
    return MultiViewDataset(std::move(views), std::move(ids), std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, "malformed manifest " + manifest_path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, "invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string matrix_hash(const Eigen::MatrixXd& m) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001B3ULL;
    }
  };
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  mix(dims, sizeof dims);
  mix(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace smc
