#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace smc {

/// Class x cluster counts plus the pair statistics every metric is built from.
/// Pair counts: tp = same class and same cluster, fn = same class only,
/// fp = same cluster only, tn = different in both.
struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;  // classes x clusters
  std::vector<std::int64_t> class_totals;
  std::vector<std::int64_t> cluster_totals;
  std::int64_t n = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::size_t class_count() const { return class_totals.size(); }
  std::size_t cluster_count() const { return cluster_totals.size(); }
  std::int64_t pair_count() const { return n * (n - 1) / 2; }
  /// Agreement counts of the Rand index: a = tp, b = tn.
  std::int64_t agree_same() const { return tp; }
  std::int64_t agree_different() const { return tn; }
};

struct MetricValue {
  std::string name;  // "Acc", "FM", "RI" or "Rand"
  double value = 0.0;
};

/// Labels may be arbitrary integers; classes and clusters are indexed in
/// ascending label order.
ContingencyTable contingency(std::span<const int> y_true, std::span<const int> y_pred);

/// Largest number of samples matched by a one-to-one cluster -> class map.
std::int64_t matched_count(const ContingencyTable& table);

/// Fraction of samples correctly mapped under the optimal one-to-one
/// cluster -> class assignment; unmatched clusters contribute nothing.
MetricValue accuracy(std::span<const int> y_true, std::span<const int> y_pred);
MetricValue accuracy(const ContingencyTable& table);

/// tp / sqrt((tp + fp)(tp + fn)); 0 when tp = 0.
MetricValue fmi(std::span<const int> y_true, std::span<const int> y_pred);
MetricValue fmi(const ContingencyTable& table);

/// (a + b) / C(n, 2).
MetricValue rand_index(std::span<const int> y_true, std::span<const int> y_pred);
MetricValue rand_index(const ContingencyTable& table);

/// Adjusted Rand index from the contingency table; 1 when both partitions
/// are the same trivial partition (zero denominator). Reported as "Rand".
MetricValue ari(std::span<const int> y_true, std::span<const int> y_pred);
MetricValue ari(const ContingencyTable& table);

__extension__ using int128 = __int128;

/// Integer numerator / denominator of 2 * C(n,2) * ARI.
struct AriFraction {
  int128 numerator = 0;
  int128 denominator = 0;
};
AriFraction ari_fraction(const ContingencyTable& table);

/// Optimal assignment on a square cost matrix (Hungarian method); returns,
/// for each row, the assigned column minimizing total cost.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost);

}  // namespace smc
