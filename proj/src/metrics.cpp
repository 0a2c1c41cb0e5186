#include "smc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "smc/error.hpp"

namespace smc {

namespace {

std::int64_t choose2(std::int64_t m) { return m * (m - 1) / 2; }

std::map<int, std::size_t> index_labels(std::span<const int> labels) {
  std::map<int, std::size_t> index;
  for (int l : labels) index.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, slot] : index) slot = next++;
  return index;
}

}  // namespace

ContingencyTable contingency(std::span<const int> y_true, std::span<const int> y_pred) {
  require(y_true.size() == y_pred.size(), "label vectors differ in length");
  require(y_true.size() >= 2, "metrics need at least two samples");

  const auto classes = index_labels(y_true);
  const auto clusters = index_labels(y_pred);
  ContingencyTable t;
  t.n = static_cast<std::int64_t>(y_true.size());
  t.counts.assign(classes.size(), std::vector<std::int64_t>(clusters.size(), 0));
  t.class_totals.assign(classes.size(), 0);
  t.cluster_totals.assign(clusters.size(), 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const std::size_t c = classes.at(y_true[i]);
    const std::size_t k = clusters.at(y_pred[i]);
    ++t.counts[c][k];
    ++t.class_totals[c];
    ++t.cluster_totals[k];
  }
  std::int64_t same_class = 0, same_cluster = 0;
  for (const auto& row : t.counts) {
    for (std::int64_t v : row) t.tp += choose2(v);
  }
  for (std::int64_t a : t.class_totals) same_class += choose2(a);
  for (std::int64_t b : t.cluster_totals) same_cluster += choose2(b);
  t.fn = same_class - t.tp;
  t.fp = same_cluster - t.tp;
  t.tn = t.pair_count() - t.tp - t.fp - t.fn;
  return t;
}

std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
  // Potentials-based O(n^3) Hungarian algorithm, 1-indexed internally.
  const std::size_t n = cost.size();
  for (const auto& row : cost) require(row.size() == n, "assignment cost matrix must be square");
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t r0 = match[col0];
      std::int64_t delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const std::int64_t cur = cost[r0 - 1][col - 1] - u[r0] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t col = 1; col <= n; ++col) {
    if (match[col] != 0) assignment[match[col] - 1] = col - 1;
  }
  return assignment;
}

std::int64_t matched_count(const ContingencyTable& t) {
  const std::size_t size = std::max(t.class_count(), t.cluster_count());
  std::int64_t top = 0;
  for (const auto& row : t.counts) {
    for (std::int64_t v : row) top = std::max(top, v);
  }
  // Maximize agreement = minimize (top - count); padding cells count as 0.
  std::vector<std::vector<std::int64_t>> cost(size, std::vector<std::int64_t>(size, top));
  for (std::size_t c = 0; c < t.class_count(); ++c) {
    for (std::size_t k = 0; k < t.cluster_count(); ++k) cost[k][c] = top - t.counts[c][k];
  }
  const auto assignment = min_cost_assignment(cost);
  std::int64_t matched = 0;
  for (std::size_t k = 0; k < t.cluster_count(); ++k) {
    const std::size_t c = assignment[k];
    if (c < t.class_count()) matched += t.counts[c][k];
  }
  return matched;
}

MetricValue accuracy(const ContingencyTable& t) {
  return {"Acc", static_cast<double>(matched_count(t)) / static_cast<double>(t.n)};
}

MetricValue fmi(const ContingencyTable& t) {
  if (t.tp == 0) return {"FM", 0.0};
  const double denom = std::sqrt(static_cast<double>(t.tp + t.fp) * static_cast<double>(t.tp + t.fn));
  return {"FM", static_cast<double>(t.tp) / denom};
}

MetricValue rand_index(const ContingencyTable& t) {
  return {"RI", static_cast<double>(t.tp + t.tn) / static_cast<double>(t.pair_count())};
}

AriFraction ari_fraction(const ContingencyTable& t) {
  const int128 pairs = t.pair_count();
  const int128 a = t.tp + t.fn;  // sum over classes of C(a_c, 2)
  const int128 b = t.tp + t.fp;  // sum over clusters of C(b_k, 2)
  AriFraction f;
  f.numerator = 2 * (static_cast<int128>(t.tp) * pairs - a * b);
  f.denominator = (a + b) * pairs - 2 * a * b;
  return f;
}

MetricValue ari(const ContingencyTable& t) {
  const AriFraction f = ari_fraction(t);
  if (f.denominator == 0) return {"Rand", 1.0};
  return {"Rand", static_cast<double>(f.numerator) / static_cast<double>(f.denominator)};
}

MetricValue accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  return accuracy(contingency(y_true, y_pred));
}
MetricValue fmi(std::span<const int> y_true, std::span<const int> y_pred) {
  return fmi(contingency(y_true, y_pred));
}
MetricValue rand_index(std::span<const int> y_true, std::span<const int> y_pred) {
  return rand_index(contingency(y_true, y_pred));
}
MetricValue ari(std::span<const int> y_true, std::span<const int> y_pred) {
  return ari(contingency(y_true, y_pred));
}

}  // namespace smc
