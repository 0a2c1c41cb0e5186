// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "smc/cluster.hpp"
#include "smc/error.hpp"
#include "smc/metrics.hpp"
#include "smc/pipeline.hpp"
#include "smc/random.hpp"
#include "smc/reduce.hpp"
#include "smc/views.hpp"
#include "support.hpp"

using namespace smc;
using smc::testing::blobs;
using smc::testing::random_labels;
using smc::testing::random_matrix;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ------------------------------------------------------------- 1 metrics

/// Every labelling of n items as a restricted growth string, i.e. one
/// representative per set partition.
std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      cur[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
  return out;
}

Outcome metric_oracle() {
  long long pairs = 0, mismatches = 0;
  for (int n = 2; n <= 7; ++n) {
    const auto parts = all_partitions(n);
    for (const auto& a : parts) {
      for (const auto& b : parts) {
        ++pairs;
        const ContingencyTable t = contingency(a, b);
        const oracle::PairCounts pc = oracle::pair_counts(a, b);
        bool ok = t.tp == pc.tp && t.fp == pc.fp && t.fn == pc.fn && t.tn == pc.tn;
        ok = ok && matched_count(t) == oracle::best_matching(a, b);
        ok = ok && accuracy(t).value == oracle::accuracy(a, b).value();
        ok = ok && rand_index(t).value == oracle::rand_index(pc).value();
        const oracle::Fraction ar = oracle::ari(pc);
        const AriFraction impl = ari_fraction(t);
        // Same rational: cross-multiplied integers agree exactly.
        if (impl.denominator != 0) ok = ok && impl.numerator * ar.den == ar.num * impl.denominator;
        ok = ok && ari(t).value == ar.value();
        const double direct_fmi =
            pc.tp == 0 ? 0.0
                       : static_cast<double>(pc.tp) /
                             std::sqrt(static_cast<double>(pc.tp + pc.fp) * static_cast<double>(pc.tp + pc.fn));
        ok = ok && fmi(t).value == direct_fmi;
        // The rounded FMI squares back to the exact rational within two ulps.
        const oracle::Fraction f2 = oracle::fmi_squared(pc);
        ok = ok && std::abs(direct_fmi * direct_fmi - f2.value()) <= 4.0 * std::numeric_limits<double>::epsilon();
        if (!ok) ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("%.0f partition pairs, %.0f mismatches", static_cast<double>(pairs),
                               static_cast<double>(mismatches))};
}

// ----------------------------------------------------------------- 2 ARI

Outcome ari_null() {
  Rng rng(derive_seed(2024, {"acceptance", "ari-null"}));
  double sum = 0.0;
  for (int t = 0; t < 100; ++t) sum += ari(random_labels(rng, 200, 3), random_labels(rng, 200, 3)).value;
  const double mean = sum / 100.0;
  return {mean > -0.02 && mean < 0.02, fmt("mean ARI %.5f", mean)};
}

// ----------------------------------------------------------------- 3 LDA

Outcome lda_oracle() {
  Rng rng(derive_seed(2024, {"acceptance", "lda"}));
  double worst_value = 0.0, worst_cos = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> y;
    const Eigen::MatrixXd centers = random_matrix(rng, 3, 5, 2.0);
    const int per = 6 + static_cast<int>(rng.index(15));
    const Eigen::MatrixXd mix = random_matrix(rng, 5, 5) + 2.0 * Eigen::MatrixXd::Identity(5, 5);
    const Eigen::MatrixXd X = blobs(rng, centers, per, 1.0, y) * mix;
    const ProjectionModel m = lda_fit(X, y, 2);
    const oracle::EigenPairs ref = oracle::lda_reference(X, y, 1e-6);
    for (int j = 0; j < 2; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      worst_value = std::max(worst_value, std::abs(m.spectrum(j) - ref.values[sj]));
      worst_cos = std::max(worst_cos, oracle::cosine_distance(m.basis.col(j), ref.vectors[sj]));
    }
  }
  return {worst_value <= 1e-8 && worst_cos <= 1e-6,
          fmt("max |eigenvalue diff| %.2e, max cosine distance %.2e", worst_value, worst_cos)};
}

// ---------------------------------------------------------------- 4 GLCM

bool same_features(const GlcmFeatures& a, const GlcmFeatures& b) {
  return a.contrast == b.contrast && a.homogeneity == b.homogeneity && a.energy == b.energy &&
         a.correlation == b.correlation;
}

Outcome glcm_oracle() {
  Rng rng(derive_seed(2024, {"acceptance", "glcm"}));
  const std::vector<Offset> offsets = ViewConfig{}.offsets;
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    QuantizedImage q;
    q.width = 1 + static_cast<int>(rng.index(7));
    q.height = 1 + static_cast<int>(rng.index(7));
    q.levels = 2 + static_cast<int>(rng.index(15));
    for (int i = 0; i < q.width * q.height; ++i) q.bins.push_back(static_cast<int>(rng.index(static_cast<std::size_t>(q.levels))));
    const bool symmetric = trial % 4 != 3;
    const oracle::GlcmCounts counts = oracle::glcm_counts(q, offsets, symmetric);
    if (counts.total == 0) {
      try {
        glcm(q, offsets, symmetric);
        ++mismatches;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyGlcm) ++mismatches;
      }
      continue;
    }
    const std::vector<double> p = oracle::glcm_probabilities(counts);
    const Glcm g = glcm(q, offsets, symmetric);
    if (g.p != p || !same_features(glcm_features(g), oracle::glcm_features(q.levels, p))) ++mismatches;
  }
  QuantizedImage hand;
  hand.width = hand.height = 2;
  hand.levels = 2;
  hand.bins = {0, 1, 1, 0};
  const std::vector<Offset> horizontal = {{0, 1}};
  const GlcmFeatures f = glcm_features(glcm(hand, horizontal, false));
  const bool hand_ok = f.contrast == 1.0 && f.homogeneity == 0.5 && f.energy == 0.5 && f.correlation == -1.0;
  return {mismatches == 0 && hand_ok,
          fmt("200 windows, %.0f mismatches; hand window (%g, %g, ", mismatches, f.contrast, f.homogeneity) +
              fmt("%g, %g)", f.energy, f.correlation)};
}

// --------------------------------------------------------------- 5 RMKMC

Outcome rmkmc_properties() {
  Rng rng(derive_seed(2024, {"acceptance", "rmkmc"}));
  int non_monotone = 0, off_simplex = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::MatrixXd> views;
    const int m = 2 + static_cast<int>(rng.index(3));
    for (int v = 0; v < m; ++v) views.push_back(random_matrix(rng, 50, 1 + static_cast<int>(rng.index(4)), rng.uniform(0.5, 3.0)));
    const RmkmcResult r = rmkmc(views, 3, {.seed = rng.next()});
    const auto& trace = r.assignment.objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i] > trace[i - 1] + 1e-9 * std::max(1.0, trace[i - 1])) ++non_monotone;
    }
    for (const auto& alpha : r.alpha_trace) {
      double s = 0.0;
      for (double a : alpha) s += a;
      if (std::abs(s - 1.0) > 1e-12) ++off_simplex;
    }
  }
  bool single_ok = true;
  {
    const RmkmcResult r = rmkmc({random_matrix(rng, 40, 3)}, 3, {.seed = 1});
    for (const auto& alpha : r.alpha_trace) single_ok = single_ok && alpha == std::vector<double>{1.0};
  }
  double dup_err = 0.0;
  {
    const Eigen::MatrixXd X = random_matrix(rng, 40, 2);
    const RmkmcResult r = rmkmc({X, X, X}, 3, {.seed = 2});
    for (double a : r.alpha) dup_err = std::max(dup_err, std::abs(a - 1.0 / 3.0));
  }
  int wins = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> y;
    Eigen::MatrixXd centers(3, 2);
    centers << 0, 0, 6, 0, 0, 6;
    const Eigen::MatrixXd signal = blobs(rng, centers, 20, 1.0, y);
    const RmkmcResult r = rmkmc({signal, random_matrix(rng, 60, 2)}, 3, {.seed = rng.next()});
    if (r.alpha[0] > r.alpha[1]) ++wins;
  }
  const bool pass = non_monotone == 0 && off_simplex == 0 && single_ok && dup_err <= 1e-6 && wins >= 18;
  return {pass, fmt("trace violations %.0f, simplex violations %.0f, ", non_monotone, off_simplex) +
                    std::string(single_ok ? "M=1 ok, " : "M=1 FAILED, ") +
                    fmt("duplicate-view alpha err %.1e, signal view wins %.0f/20", dup_err, wins)};
}

// -------------------------------------------------------- 6 SMC vs UCP

Outcome smc_beats_ucp() {
  double smc_sum = 0.0, ucp_sum = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    ExperimentConfig c;
    c.master_seed = seed;
    c.data.synthetic.n_per_class = 50;
    c.data.synthetic.image_size = 32;
    c.data.synthetic.nuisance = 1.0;
    const double s = overall_average(run_smc(c), Metric::Acc).mean;
    const double u = overall_average(run_ucp(c), Metric::Acc).mean;
    smc_sum += s;
    ucp_sum += u;
    per_seed += fmt(" %.3f/%.3f", s, u);
  }
  const double diff = (smc_sum - ucp_sum) / 5.0;
  return {diff >= 0.05, fmt("SMC %.3f vs UCP %.3f, diff %.3f; per seed SMC/UCP:", smc_sum / 5.0, ucp_sum / 5.0, diff) +
                            per_seed};
}

// ----------------------------------------------------- 7 multi-view gain

/// Three classes over two views: view "a" moves class 0 away from the rest,
/// view "b" moves class 1. No single view separates all three classes.
MultiViewDataset complementary_views(std::uint64_t seed) {
  Rng rng(seed);
  const int per = 30, d = 20;
  const double shift = 6.0;
  std::vector<int> labels;
  std::vector<std::string> ids;
  Eigen::MatrixXd a = random_matrix(rng, 3 * per, d);
  Eigen::MatrixXd b = random_matrix(rng, 3 * per, d);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per; ++i) {
      const int r = c * per + i;
      if (c == 0) a(r, 0) += shift;
      if (c == 1) b(r, 0) += shift;
      labels.push_back(c);
      ids.push_back("s" + std::to_string(r));
    }
  }
  return MultiViewDataset({{"a", a}, {"b", b}}, ids, labels);
}

Outcome multi_view_gain() {
  double rm_sum = 0.0;
  std::map<std::string, double> km_sum;
  for (std::uint64_t seed = 200; seed < 205; ++seed) {
    ExperimentConfig c;
    c.master_seed = seed;
    c.algorithms = {Algorithm::KMeans};
    const EvalReport r = run_smc(complementary_views(seed), c);
    rm_sum += cell_summary(*r.multi_view, Metric::Acc).mean;
    for (const std::string& v : r.views) km_sum[v] += cell_summary(r.cell(v, "K-Means"), Metric::Acc).mean;
  }
  double best_single = 0.0;
  for (const auto& [v, s] : km_sum) best_single = std::max(best_single, s / 5.0);
  const double rm = rm_sum / 5.0;
  return {rm >= best_single - 0.02, fmt("RMKMC %.3f vs best single-view K-Means %.3f", rm, best_single)};
}

// ------------------------------------------------- 8 shape and hygiene

ExperimentConfig hygiene_config() {
  ExperimentConfig c;
  c.master_seed = 77;
  c.data.synthetic.n_per_class = 20;
  return c;
}

Outcome shape_and_hygiene() {
  std::map<int, std::set<std::size_t>> fit_rows, test_rows;
  RunHooks hooks;
  hooks.on_access = [&](const AccessRecord& a) {
    auto& target = a.purpose == AccessPurpose::Fit ? fit_rows : test_rows;
    target[a.fold].insert(a.rows.begin(), a.rows.end());
  };
  const ExperimentConfig c = hygiene_config();
  const EvalReport r = run_smc(c, hooks);
  bool shape = r.views.size() == 7 && r.algorithms.size() == 6 && r.cells.size() == 42 && r.multi_view;
  for (const ReportCell& cell : r.cells) {
    for (Metric m : kMetrics) shape = shape && cell.folds.of(m).size() == 5;
  }
  if (r.multi_view) {
    for (Metric m : kMetrics) shape = shape && r.multi_view->folds.of(m).size() == 5;
  }
  // Independently recompute the test folds and count fit reads that hit them.
  const MultiViewDataset data = load_dataset(c);
  const SplitPlan plan = stratified_folds(*data.labels(), 5, derive_seed(c.master_seed, {"split"}));
  std::size_t leaks = 0;
  for (int f = 0; f < 5; ++f) {
    const auto& test = plan.test[static_cast<std::size_t>(f)];
    for (std::size_t i : fit_rows[f]) leaks += std::binary_search(test.begin(), test.end(), i) ? 1 : 0;
    shape = shape && test_rows[f] == std::set<std::size_t>(test.begin(), test.end());
  }
  const bool identical = to_json(run_smc(c)).dump() == to_json(r).dump() &&
                         to_json(run_ucp(c)).dump() == to_json(run_ucp(c)).dump();
  return {shape && leaks == 0 && identical,
          std::string(shape ? "7x6x5 + RMKMCx5" : "shape WRONG") + fmt(", %.0f test rows read during fit, ", static_cast<double>(leaks)) +
              (identical ? "reruns bit-identical" : "reruns DIFFER")};
}

// --------------------------------------------------------- 9 CSV format

Outcome csv_format() {
  ExperimentConfig c = hygiene_config();
  c.data.synthetic.n_per_class = 10;
  c.data.synthetic.image_size = 14;
  const EvalReport r = run_smc(c);
  const std::regex acc_cell(R"(\d{1,3}\.\d±\d{1,3}\.\d)");
  const std::regex ratio_cell(R"(-?\d\.\d\d±\d\.\d\d)");
  bool ok = true;
  std::string first_bad;
  for (Metric m : kMetrics) {
    std::stringstream ss(table_csv(r, m));
    std::string line;
    std::getline(ss, line);
    ok = ok && line == "View,GMM,K-Means,K-Medoids,AC,Birch,SC,Average,RMKMC";
    int rows = 0;
    while (std::getline(ss, line)) {
      if (line.empty()) continue;
      ++rows;
      std::vector<std::string> cells;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (line.back() == ',') cells.emplace_back();
      if (cells.size() != 9) {
        ok = false;
        continue;
      }
      for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i].empty()) continue;
        if (!std::regex_match(cells[i], m == Metric::Acc ? acc_cell : ratio_cell)) {
          ok = false;
          if (first_bad.empty()) first_bad = cells[i];
        }
      }
      const bool is_average = cells[0] == "Average";
      // Views leave RMKMC blank; the Average row leaves its Average cell blank.
      ok = ok && (is_average ? cells[7].empty() && !cells[8].empty() : !cells[7].empty() && cells[8].empty());
    }
    ok = ok && rows == 8;
  }
  return {ok, first_bad.empty() ? "header, 8 data rows, cell formats ok" : "bad cell '" + first_bad + "'"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "metric oracle equivalence (exhaustive n<=7)", 60, metric_oracle},
      {2, "ARI null mean in (-0.02, 0.02)", 10, ari_null},
      {3, "LDA matches generalized eigensolver", 10, lda_oracle},
      {4, "GLCM matches pair enumeration", 5, glcm_oracle},
      {5, "RMKMC optimization properties", 60, rmkmc_properties},
      {6, "SMC beats UCP by >= 0.05 Acc", 300, smc_beats_ucp},
      {7, "RMKMC >= best single-view K-Means - 0.02", 300, multi_view_gain},
      {8, "pipeline shape, leakage, determinism", 120, shape_and_hygiene},
      {9, "report CSV layout and cell format", 60, csv_format},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s [%d] %s: %s (%.2fs, budget %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_seconds, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
