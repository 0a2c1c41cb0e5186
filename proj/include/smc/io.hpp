#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "smc/views.hpp"

namespace smc {

struct LabelTable {
  std::vector<std::string> sample_ids;
  std::vector<int> labels;
};

/// CSV with header "sample_id,label".
LabelTable read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                      const std::vector<int>& labels);

/// Labels reordered to match `ids`; every id must be present in the table.
std::vector<int> labels_for(const LabelTable& table, const std::vector<std::string>& ids);

/// Matrix CSV: header "<name>,<d>", then one row per sample "sample_id,x1,...,xd".
/// Values are written with 17 significant digits, so a round trip is exact.
struct NamedMatrix {
  std::string name;
  std::vector<std::string> sample_ids;
  Eigen::MatrixXd matrix;
};
NamedMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const std::string& name,
                      const std::vector<std::string>& ids, const Eigen::MatrixXd& matrix);

/// Writes one matrix CSV per view plus manifest.json into `dir`.
void write_dataset(const std::filesystem::path& dir, const MultiViewDataset& data,
                   const nlohmann::json& config_echo);

/// Loads a dataset from a manifest; labels come from `labels_csv` when given.
MultiViewDataset read_dataset(const std::filesystem::path& manifest,
                              const std::filesystem::path& labels_csv = {});

nlohmann::json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// FNV-1a over the dimensions and raw bytes of a matrix, as 16 hex digits.
std::string matrix_hash(const Eigen::MatrixXd& m);

}  // namespace smc
