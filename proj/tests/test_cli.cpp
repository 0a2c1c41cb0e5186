#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "smc/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = 0;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "smc_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(SMC_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = smc::read_text_file(err);
  return r;
}

}  // namespace

TEST(Cli, FilePipeline) {
  const fs::path w = work_dir();
  const std::string cfg = (w / "cfg.json").string();
  smc::write_text_file(cfg, R"({"data": {"synthetic": {"n_per_class": 6, "image_size": 16}}, "seed": 3})");
  ASSERT_EQ(run("synth -c " + cfg + " -o " + (w / "img").string()).status, 0);
  ASSERT_TRUE(fs::exists(w / "img" / "labels.csv"));
  ASSERT_EQ(run("extract -c " + cfg + " --images " + (w / "img").string() + " --labels " +
                (w / "img" / "labels.csv").string() + " -o " + (w / "views").string())
                .status,
            0);
  ASSERT_EQ(run("reduce -m " + (w / "views" / "manifest.json").string() + " --train " +
                (w / "img" / "labels.csv").string() + " -o " + (w / "reduced").string())
                .status,
            0);
  ASSERT_TRUE(fs::exists(w / "reduced" / "models" / "contrast.json"));
  ASSERT_EQ(run("cluster -m " + (w / "reduced" / "manifest.json").string() + " -a rmkmc -k 3 --seed 4 -o " +
                (w / "clusters").string())
                .status,
            0);
  ASSERT_EQ(run("evaluate -t " + (w / "img" / "labels.csv").string() + " -p " +
                (w / "clusters" / "multi-view.rmkmc.csv").string() + " -o " + (w / "eval.json").string())
                .status,
            0);
  const auto eval = smc::read_json_file(w / "eval.json");
  const double acc = eval["metrics"][0]["Acc"].get<double>();
  EXPECT_GE(acc, 0.0);
  EXPECT_LE(acc, 1.0);
}

TEST(Cli, RunEchoesConfigVerbatim) {
  const fs::path w = work_dir();
  const std::string text =
      "{ \"seed\": 5,\n  \"data\": {\"synthetic\": {\"n_per_class\": 10, \"image_size\": 14}},\n"
      "  \"clustering\": {\"algorithms\": [\"kmeans\"]} }\n";
  smc::write_text_file(w / "run.json", text);
  ASSERT_EQ(run("run-smc -c " + (w / "run.json").string() + " --compare -o " + (w / "out").string()).status, 0);
  const auto report = smc::read_json_file(w / "out" / "smc_report.json");
  EXPECT_EQ(report["config_text"].get<std::string>(), text);
  EXPECT_TRUE(fs::exists(w / "out" / "ucp_acc.csv"));
  EXPECT_TRUE(fs::exists(w / "out" / "by_algorithm_acc.svg"));
  ASSERT_EQ(run("report -i " + (w / "out" / "smc_report.json").string() + " -o " + (w / "again").string()).status, 0);
  EXPECT_EQ(smc::read_text_file(w / "again" / "smc_acc.csv"), smc::read_text_file(w / "out" / "smc_acc.csv"));
}

TEST(Cli, ErrorsAreMachineReadable) {
  const fs::path w = work_dir();
  const Result bad = run("run-smc --set split.labeled_fraction=1.0 -o " + (w / "bad").string());
  EXPECT_EQ(bad.status, 2);
  const auto err = nlohmann::json::parse(bad.err);
  EXPECT_EQ(err["error"]["code"], "InvalidInput");

  const Result missing = run("run-smc -c /nonexistent.json -o " + (w / "bad").string());
  EXPECT_NE(missing.status, 0);
  EXPECT_EQ(nlohmann::json::parse(missing.err)["error"].contains("code"), true);

  const Result unknown = run("frobnicate");
  EXPECT_NE(unknown.status, 0);
}
