#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "smc/error.hpp"
#include "smc/io.hpp"
#include "smc/pipeline.hpp"

namespace smc {

using nlohmann::json;

std::string to_string(Metric m) {
  switch (m) {
    case Metric::Acc: return "Acc";
    case Metric::FM: return "FM";
    case Metric::Rand: return "Rand";
  }
  return "Acc";
}

const std::vector<double>& FoldValues::of(Metric m) const {
  switch (m) {
    case Metric::Acc: return acc;
    case Metric::FM: return fm;
    case Metric::Rand: return rand;
  }
  return acc;
}

std::vector<double>& FoldValues::of(Metric m) {
  return const_cast<std::vector<double>&>(std::as_const(*this).of(m));
}

const ReportCell& EvalReport::cell(const std::string& view, const std::string& algorithm) const {
  for (const ReportCell& c : cells) {
    if (c.view == view && c.algorithm == algorithm) return c;
  }
  if (multi_view && multi_view->view == view && multi_view->algorithm == algorithm) return *multi_view;
  fail(ErrorCode::InvalidInput, "report has no cell (" + view + ", " + algorithm + ")");
}

Summary summarize(std::span<const double> values) {
  require(!values.empty(), "cannot summarize an empty series");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

Summary cell_summary(const ReportCell& cell, Metric m) { return summarize(cell.folds.of(m)); }

Summary view_average(const EvalReport& r, const std::string& view, Metric m, bool with_multi_view) {
  std::vector<double> pooled;
  for (const ReportCell& c : r.cells) {
    if (c.view == view) pooled.insert(pooled.end(), c.folds.of(m).begin(), c.folds.of(m).end());
  }
  if (with_multi_view && r.multi_view) {
    const auto& mv = r.multi_view->folds.of(m);
    pooled.insert(pooled.end(), mv.begin(), mv.end());
  }
  return summarize(pooled);
}

Summary algorithm_average(const EvalReport& r, const std::string& algorithm, Metric m) {
  std::vector<double> pooled;
  for (const ReportCell& c : r.cells) {
    if (c.algorithm == algorithm) pooled.insert(pooled.end(), c.folds.of(m).begin(), c.folds.of(m).end());
  }
  return summarize(pooled);
}

Summary overall_average(const EvalReport& r, Metric m) {
  std::vector<double> pooled;
  for (const ReportCell& c : r.cells) pooled.insert(pooled.end(), c.folds.of(m).begin(), c.folds.of(m).end());
  return summarize(pooled);
}

namespace {

json cell_json(const ReportCell& c) {
  json j = {{"view", c.view}, {"algorithm", c.algorithm}};
  for (Metric m : kMetrics) {
    const Summary s = summarize(c.folds.of(m));
    j[to_string(m)] = {{"folds", c.folds.of(m)}, {"mean", s.mean}, {"std", s.std}};
  }
  return j;
}

ReportCell cell_from_json(const json& j) {
  ReportCell c;
  c.view = j.at("view").get<std::string>();
  c.algorithm = j.at("algorithm").get<std::string>();
  for (Metric m : kMetrics) c.folds.of(m) = j.at(to_string(m)).at("folds").get<std::vector<double>>();
  return c;
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

}  // namespace

json to_json(const EvalReport& r) {
  json cells = json::array();
  for (const ReportCell& c : r.cells) cells.push_back(cell_json(c));
  json diagnostics = json::array();
  for (const FoldDiagnostics& d : r.diagnostics) {
    diagnostics.push_back({{"train_size", d.train_size},
                           {"cluster_size", d.cluster_size},
                           {"reduced_hashes", d.reduced_hashes},
                           {"multi_view_hashes", d.multi_view_hashes},
                           {"alpha", d.alpha}});
  }

  json averages = {{"per_algorithm", json::object()}, {"per_view", json::object()}};
  for (Metric m : kMetrics) {
    const std::string key = to_string(m);
    json per_algo = json::object();
    for (const std::string& a : r.algorithms) per_algo[a] = summary_json(algorithm_average(r, a, m));
    json per_view = json::object();
    if (!r.algorithms.empty()) {
      for (const std::string& v : r.views) {
        json entry = {{"without_multi_view", summary_json(view_average(r, v, m, false))}};
        if (r.multi_view) entry["with_multi_view"] = summary_json(view_average(r, v, m, true));
        per_view[v] = entry;
      }
    }
    averages["per_algorithm"][key] = per_algo;
    averages["per_view"][key] = per_view;
    if (!r.cells.empty()) averages["overall"][key] = summary_json(overall_average(r, m));
  }

  json j = {{"framework", r.framework},
            {"reduction", to_string(r.reduction)},
            {"fold_count", r.fold_count},
            {"clusters", r.clusters},
            {"components", r.components},
            {"views", r.views},
            {"algorithms", r.algorithms},
            {"cells", cells},
            {"multi_view", r.multi_view ? cell_json(*r.multi_view) : json(nullptr)},
            {"averages", averages},
            {"diagnostics", diagnostics},
            {"config", r.config},
            {"config_text", r.config_text}};
  return j;
}

EvalReport report_from_json(const json& j) {
  try {
    EvalReport r;
    r.framework = j.at("framework").get<std::string>();
    r.reduction = parse_reduction_kind(j.at("reduction").get<std::string>());
    r.fold_count = j.at("fold_count").get<int>();
    r.clusters = j.at("clusters").get<int>();
    r.components = j.at("components").get<int>();
    r.views = j.at("views").get<std::vector<std::string>>();
    r.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    for (const json& c : j.at("cells")) r.cells.push_back(cell_from_json(c));
    if (!j.at("multi_view").is_null()) r.multi_view = cell_from_json(j.at("multi_view"));
    for (const json& d : j.at("diagnostics")) {
      FoldDiagnostics fd;
      fd.train_size = d.at("train_size").get<std::size_t>();
      fd.cluster_size = d.at("cluster_size").get<std::size_t>();
      fd.reduced_hashes = d.at("reduced_hashes").get<std::vector<std::string>>();
      fd.multi_view_hashes = d.at("multi_view_hashes").get<std::vector<std::string>>();
      fd.alpha = d.at("alpha").get<std::vector<double>>();
      r.diagnostics.push_back(std::move(fd));
    }
    r.config = j.at("config");
    r.config_text = j.at("config_text").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("malformed report JSON: ") + e.what());
  }
}

std::string format_cell(const Summary& s, Metric m) {
  char buf[64];
  if (m == Metric::Acc) {
    std::snprintf(buf, sizeof buf, "%.1f±%.1f", 100.0 * s.mean, 100.0 * s.std);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f±%.2f", s.mean, s.std);
  }
  return buf;
}

std::string table_csv(const EvalReport& r, Metric m) {
  std::ostringstream out;
  out << "View";
  for (const std::string& a : r.algorithms) out << ',' << a;
  out << ",Average,RMKMC\n";
  for (const std::string& v : r.views) {
    out << v;
    for (const std::string& a : r.algorithms) out << ',' << format_cell(cell_summary(r.cell(v, a), m), m);
    out << ',';
    if (!r.algorithms.empty()) out << format_cell(view_average(r, v, m, false), m);
    out << ",\n";
  }
  out << "Average";
  for (const std::string& a : r.algorithms) out << ',' << format_cell(algorithm_average(r, a, m), m);
  out << ",,";
  if (r.multi_view) out << format_cell(cell_summary(*r.multi_view, m), m);
  out << '\n';
  return out.str();
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::string grouped_bar_svg(const std::string& title, const std::vector<std::string>& groups,
                            const std::vector<BarSeries>& series, Metric m) {
  static const char* kColors[] = {"#4472c4", "#ed7d31", "#70ad47", "#ffc000", "#5b9bd5"};
  const double scale = m == Metric::Acc ? 100.0 : 1.0;
  double lo = 0.0;
  double hi = m == Metric::Rand ? 0.0 : scale;
  for (const BarSeries& s : series) {
    for (const Summary& v : s.values) {
      lo = std::min(lo, (v.mean - v.std) * scale);
      hi = std::max(hi, (v.mean + v.std) * scale);
    }
  }
  if (hi <= lo) hi = lo + 1.0;

  const double bar = 18.0;
  const double gap = 24.0;
  const double left = 60.0;
  const double top = 40.0;
  const double plot_h = 260.0;
  const double group_w = bar * static_cast<double>(std::max<std::size_t>(series.size(), 1)) + gap;
  const double width = left + group_w * static_cast<double>(groups.size()) + 140.0;
  const double height = top + plot_h + 90.0;
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(title) << "</text>\n";

  for (int t = 0; t <= 5; ++t) {
    const double v = lo + (hi - lo) * t / 5.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(width - 140.0) << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << num(v) << "</text>\n";
  }
  const double zero = y_of(0.0);
  svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(zero) << "\" x2=\"" << num(width - 140.0)
      << "\" y2=\"" << num(zero) << "\" stroke=\"black\"/>\n";

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = left + gap / 2 + group_w * static_cast<double>(g);
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (g >= series[s].values.size()) continue;
      const Summary& v = series[s].values[g];
      const double x = gx + bar * static_cast<double>(s);
      const double y = y_of(v.mean * scale);
      svg << "<rect x=\"" << num(x) << "\" y=\"" << num(std::min(y, zero)) << "\" width=\""
          << num(bar - 2) << "\" height=\"" << num(std::abs(zero - y)) << "\" fill=\""
          << kColors[s % 5] << "\"><title>" << escape_xml(series[s].name) << ' '
          << escape_xml(groups[g]) << ": " << format_cell(v, m) << "</title></rect>\n";
      const double cx = x + (bar - 2) / 2;
      svg << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y_of((v.mean - v.std) * scale))
          << "\" x2=\"" << num(cx) << "\" y2=\"" << num(y_of((v.mean + v.std) * scale))
          << "\" stroke=\"black\"/>\n";
    }
    const double lx = gx + bar * static_cast<double>(series.size()) / 2;
    const double ly = top + plot_h + 14;
    svg << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" text-anchor=\"end\" transform=\"rotate(-35 "
        << num(lx) << ' ' << num(ly) << ")\">" << escape_xml(groups[g]) << "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = top + 16.0 * static_cast<double>(s);
    svg << "<rect x=\"" << num(width - 125) << "\" y=\"" << num(y) << "\" width=\"12\" height=\"12\" fill=\""
        << kColors[s % 5] << "\"/>\n";
    svg << "<text x=\"" << num(width - 108) << "\" y=\"" << num(y + 10) << "\">" << escape_xml(series[s].name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> emit_report(const std::filesystem::path& dir, const EvalReport& report,
                                               const EvalReport* baseline, const ReportFormats& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    fail(ErrorCode::IoError, "cannot create output directory " + dir.string());
  }

  std::vector<const EvalReport*> reports{&report};
  if (baseline) reports.push_back(baseline);
  std::vector<std::filesystem::path> written;
  auto put = [&written](const std::filesystem::path& p, const std::string& text) {
    write_text_file(p, text);
    written.push_back(p);
  };

  for (const EvalReport* r : reports) {
    const std::string prefix = lowercase(r->framework);
    if (formats.csv) {
      for (Metric m : kMetrics) put(dir / (prefix + "_" + lowercase(to_string(m)) + ".csv"), table_csv(*r, m));
    }
    if (formats.json) put(dir / (prefix + "_report.json"), to_json(*r).dump(2) + "\n");
  }

  if (formats.svg) {
    for (Metric m : kMetrics) {
      std::vector<std::string> algo_groups = report.algorithms;
      if (report.multi_view) algo_groups.push_back("RMKMC");
      std::vector<BarSeries> per_algo;
      std::vector<BarSeries> per_view;
      for (const EvalReport* r : reports) {
        BarSeries a{r->framework, {}};
        for (const std::string& name : report.algorithms) a.values.push_back(algorithm_average(*r, name, m));
        if (report.multi_view && r->multi_view) a.values.push_back(cell_summary(*r->multi_view, m));
        per_algo.push_back(std::move(a));
        BarSeries v{r->framework, {}};
        if (!report.algorithms.empty()) {
          for (const std::string& name : report.views) v.values.push_back(view_average(*r, name, m, true));
        }
        per_view.push_back(std::move(v));
      }
      const std::string metric = to_string(m);
      put(dir / ("by_algorithm_" + lowercase(metric) + ".svg"),
          grouped_bar_svg(metric + " by algorithm (mean over views)", algo_groups, per_algo, m));
      put(dir / ("by_view_" + lowercase(metric) + ".svg"),
          grouped_bar_svg(metric + " by view (mean over algorithms and RMKMC)", report.views, per_view, m));
    }
  }
  return written;
}

}  // namespace smc
