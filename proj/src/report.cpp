#include "geocoherence/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace geocoherence {

namespace {

using ojson = nlohmann::ordered_json;

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // "-0.00" reads as a change where there is none.
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string number9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string optional_cell(const std::optional<double>& v) { return v ? number9(*v) : std::string(); }

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string alpha_label(std::size_t alpha) {
  return alpha == 0 ? std::string("NoDC") : std::to_string(alpha) + "-DC";
}

std::vector<Algorithm> algorithms_in(const ExperimentTable& table) {
  std::vector<Algorithm> out;
  for (const auto& c : table.cells) {
    if (std::find(out.begin(), out.end(), c.algorithm) == out.end()) out.push_back(c.algorithm);
  }
  return out;
}

std::vector<std::size_t> alphas_in(const ExperimentTable& table, Algorithm algorithm) {
  std::vector<std::size_t> out;
  for (const auto& c : table.cells) {
    if (c.algorithm == algorithm && c.alpha > 0) out.push_back(c.alpha);
  }
  return out;
}

}  // namespace

std::size_t best_alpha(const ExperimentTable& table, Algorithm algorithm) {
  const ExperimentCell* best = nullptr;
  for (const auto& c : table.cells) {
    if (c.algorithm != algorithm || c.alpha == 0) continue;
    if (best == nullptr || c.metrics.f1 > best->metrics.f1) best = &c;
  }
  return best == nullptr ? 0 : best->alpha;
}

std::vector<double> metric_values(const MetricsReport& m) {
  return {m.f1, m.accuracy, m.precision, m.recall, m.fpr, m.fnr};
}

std::string percent2(double fraction) { return fixed(fraction * 100.0, 2); }

std::string signed_percent2(double fraction) {
  std::string s = fixed(fraction * 100.0, 2);
  if (s.front() != '-' && s.find_first_not_of("0.") != std::string::npos) s.insert(0, "+");
  return s;
}

ojson summary_json(const DatasetSummary& summary, std::size_t rejected) {
  ojson doc;
  doc["samples"] = summary.total;
  doc["users"] = summary.per_user.size();
  doc["rejected"] = rejected;
  ojson users = ojson::object();
  for (const auto& [u, n] : summary.per_user) users[u] = n;
  doc["per_user"] = users;
  doc["first"] = summary.first ? ojson(summary.first->to_iso()) : ojson(nullptr);
  doc["last"] = summary.last ? ojson(summary.last->to_iso()) : ojson(nullptr);
  if (summary.bounds) {
    const auto& b = *summary.bounds;
    doc["bounds"] = {{"min_latitude", b.min_latitude},
                     {"max_latitude", b.max_latitude},
                     {"min_longitude", b.min_longitude},
                     {"max_longitude", b.max_longitude}};
  } else {
    doc["bounds"] = nullptr;
  }
  return doc;
}

void write_summary_text(std::ostream& out, const DatasetSummary& summary, std::size_t rejected) {
  out << summary.per_user.size() << " users, " << summary.total << " samples";
  if (rejected > 0) out << " (" << rejected << " rows rejected)";
  out << '\n';
  if (summary.first && summary.last) {
    out << "span: " << summary.first->to_iso().substr(0, 10) << " .. "
        << summary.last->to_iso().substr(0, 10) << '\n';
  }
  if (summary.bounds) {
    const auto& b = *summary.bounds;
    char buf[160];
    std::snprintf(buf, sizeof buf, "bounds: lat [%.6f, %.6f], lon [%.6f, %.6f]\n", b.min_latitude,
                  b.max_latitude, b.min_longitude, b.max_longitude);
    out << buf;
  }
  for (const auto& [u, n] : summary.per_user) out << "  " << u << ": " << n << '\n';
}

ojson metrics_json(const MetricsReport& m) {
  ojson doc;
  doc["f1"] = m.f1;
  doc["accuracy"] = m.accuracy;
  doc["precision"] = m.precision;
  doc["recall"] = m.recall;
  doc["fpr"] = m.fpr;
  doc["fnr"] = m.fnr;
  return doc;
}

std::string settings_line(std::size_t k, std::size_t trees, double scale) {
  std::ostringstream s;
  s << "k=" << k << ", trees=" << trees << ", scale=" << number9(scale);
  return s.str();
}

ojson evaluation_json(const EvaluationSettings& settings, const CrossValidationResult& result,
                      std::size_t samples, std::size_t classes) {
  ojson doc;
  doc["settings"] = {{"summary", settings_line(settings.k, settings.n_estimators,
                                               settings.extraction.scale)},
                     {"algorithm", algorithm_name(settings.algorithm)},
                     {"alpha", settings.extraction.alpha},
                     {"mode", coherence_mode_name(settings.extraction.mode)},
                     {"k", settings.k},
                     {"trees", settings.n_estimators},
                     {"scale", settings.extraction.scale},
                     {"fill", settings.extraction.fill_value},
                     {"wrap_hours", settings.extraction.wrap_hours},
                     {"seed", settings.seed}};
  doc["samples"] = samples;
  doc["classes"] = classes;
  doc["filled_cells"] = result.filled_cells;
  doc["metrics"] = metrics_json(result.metrics);
  ojson percent;
  const auto values = metric_values(result.metrics);
  for (std::size_t i = 0; i < values.size(); ++i) percent[kMetricNames[i]] = percent2(values[i]);
  doc["percent"] = percent;
  return doc;
}

void write_evaluation_text(std::ostream& out, const EvaluationSettings& settings,
                           const CrossValidationResult& result, std::size_t samples,
                           std::size_t classes) {
  out << settings_line(settings.k, settings.n_estimators, settings.extraction.scale) << '\n';
  out << algorithm_title(settings.algorithm) << ", " << alpha_label(settings.extraction.alpha) << " ("
      << coherence_mode_name(settings.extraction.mode) << "), " << samples << " samples, " << classes
      << " classes, seed " << settings.seed << '\n';
  const auto values = metric_values(result.metrics);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << pad_right(kMetricNames[i], 10) << pad_left(percent2(values[i]), 8) << '\n';
  }
}

void write_comparison_table(std::ostream& out, const ExperimentTable& table) {
  const auto algorithms = algorithms_in(table);
  constexpr std::size_t kCol = 9;
  std::string header = pad_right("Measure", 10);
  std::string sub = pad_right("", 10);
  struct Column {
    const ExperimentCell* nodc;
    const ExperimentCell* best;
  };
  std::vector<Column> columns;
  for (const auto a : algorithms) {
    const std::size_t alpha = best_alpha(table, a);
    columns.push_back({table.find(a, 0), table.find(a, alpha)});
    header += " | " + pad_right(std::string(algorithm_title(a)), 3 * kCol);
    sub += " | " + pad_left("NoDC", kCol) + pad_left(alpha_label(alpha), kCol) + pad_left("Delta", kCol);
  }
  out << header << '\n' << sub << '\n';
  for (std::size_t i = 0; i < std::size(kMetricNames); ++i) {
    std::string line = pad_right(kMetricNames[i], 10);
    for (const auto& col : columns) {
      line += " | " + pad_left(percent2(metric_values(col.nodc->metrics)[i]), kCol) +
              pad_left(percent2(metric_values(col.best->metrics)[i]), kCol) +
              pad_left(signed_percent2(metric_values(col.best->delta)[i]), kCol);
    }
    out << line << '\n';
  }
}

void write_alpha_table(std::ostream& out, const ExperimentTable& table) {
  constexpr std::size_t kCol = 9;
  for (const auto a : algorithms_in(table)) {
    const auto alphas = alphas_in(table, a);
    std::string header = pad_right(std::string(algorithm_title(a)), 14) + pad_right("", 10);
    for (const auto alpha : alphas) header += pad_left(alpha_label(alpha), kCol);
    out << header << '\n';
    for (std::size_t i = 0; i < std::size(kMetricNames); ++i) {
      std::string line = pad_right("", 14) + pad_right(kMetricNames[i], 10);
      for (const auto alpha : alphas) {
        line += pad_left(percent2(metric_values(table.find(a, alpha)->metrics)[i]), kCol);
      }
      out << line << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const ExperimentTable& table) {
  out << kSweepCsvHeader << '\n';
  for (const auto& c : table.cells) {
    out << algorithm_name(c.algorithm) << ',' << c.alpha;
    for (const double v : metric_values(c.metrics)) out << ',' << number9(v);
    for (const double v : metric_values(c.delta)) out << ',' << number9(v);
    out << '\n';
  }
}

ojson experiment_json(const ExperimentTable& table) {
  ojson doc;
  const auto& cfg = table.config;
  doc["settings"] = {{"summary", settings_line(cfg.k, cfg.model.n_estimators, cfg.extraction.scale)},
                     {"k", cfg.k},
                     {"trees", cfg.model.n_estimators},
                     {"scale", cfg.extraction.scale},
                     {"mode", coherence_mode_name(cfg.extraction.mode)},
                     {"fill", cfg.extraction.fill_value},
                     {"wrap_hours", cfg.extraction.wrap_hours},
                     {"seed", cfg.model.seed},
                     {"fold_seed", cfg.fold_seed}};
  doc["samples"] = table.rows;
  doc["classes"] = table.classes;
  ojson cells = ojson::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"algorithm", algorithm_name(c.algorithm)},
                     {"alpha", c.alpha},
                     {"label", alpha_label(c.alpha)},
                     {"metrics", metrics_json(c.metrics)},
                     {"delta", metrics_json(c.delta)}});
  }
  doc["cells"] = std::move(cells);
  return doc;
}

void write_stats_csv(std::ostream& out, const std::vector<ColumnStats>& stats) {
  out << kStatsCsvHeader << '\n';
  for (const auto& s : stats) {
    out << s.name << ',' << optional_cell(s.mean) << ',' << optional_cell(s.standard_error) << ','
        << optional_cell(s.median) << ',' << optional_cell(s.standard_deviation) << ','
        << optional_cell(s.kurtosis) << ',' << optional_cell(s.skewness) << ','
        << optional_cell(s.min) << ',' << optional_cell(s.max) << '\n';
  }
}

void write_stats_text(std::ostream& out, const std::vector<ColumnStats>& stats) {
  constexpr std::size_t kCol = 14;
  const char* heads[] = {"Mean", "SE", "Median", "SD", "Kurtosis", "Skewness", "Min", "Max"};
  std::string header = pad_right("Feature", 10);
  for (const char* h : heads) header += pad_left(h, kCol);
  out << header << '\n';
  for (const auto& s : stats) {
    std::string line = pad_right(s.name, 10);
    for (const auto& v : {s.mean, s.standard_error, s.median, s.standard_deviation, s.kurtosis,
                          s.skewness, s.min, s.max}) {
      line += pad_left(v ? fixed(*v, 3) : std::string("-"), kCol);
    }
    out << line << '\n';
  }
}

ojson stats_json(const std::vector<ColumnStats>& stats) {
  ojson doc = ojson::array();
  for (const auto& s : stats) {
    doc.push_back({{"feature", s.name},
                   {"count", s.count},
                   {"mean", optional_json(s.mean)},
                   {"se", optional_json(s.standard_error)},
                   {"median", optional_json(s.median)},
                   {"sd", optional_json(s.standard_deviation)},
                   {"kurtosis", optional_json(s.kurtosis)},
                   {"skewness", optional_json(s.skewness)},
                   {"min", optional_json(s.min)},
                   {"max", optional_json(s.max)}});
  }
  return doc;
}

}  // namespace geocoherence
