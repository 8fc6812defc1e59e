#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "geocoherence/data.hpp"
#include "geocoherence/evaluation.hpp"
#include "geocoherence/features.hpp"

namespace geocoherence {

// Metric rows in the order reports print them.
inline constexpr const char* kMetricNames[] = {"F1", "Accuracy", "Precision", "Recall", "FPR", "FNR"};
std::vector<double> metric_values(const MetricsReport& m);

// Fraction as a percentage with two decimals ("99.42"). Signed form adds '+'
// to positive values ("+1.47").
std::string percent2(double fraction);
std::string signed_percent2(double fraction);

nlohmann::ordered_json summary_json(const DatasetSummary& summary, std::size_t rejected);
void write_summary_text(std::ostream& out, const DatasetSummary& summary, std::size_t rejected);

nlohmann::ordered_json metrics_json(const MetricsReport& m);

struct EvaluationSettings {
  Algorithm algorithm = Algorithm::kRandomForest;
  ExtractionConfig extraction;
  std::size_t n_estimators = 100;
  std::size_t k = 10;
  std::uint64_t seed = 0;
};

// "k=10, trees=100, scale=10000"
std::string settings_line(std::size_t k, std::size_t trees, double scale);

nlohmann::ordered_json evaluation_json(const EvaluationSettings& settings,
                                       const CrossValidationResult& result, std::size_t samples,
                                       std::size_t classes);
void write_evaluation_text(std::ostream& out, const EvaluationSettings& settings,
                           const CrossValidationResult& result, std::size_t samples,
                           std::size_t classes);

// Alpha > 0 with the highest F1 for the algorithm (lowest alpha on ties), or 0
// when the table holds only the baseline.
std::size_t best_alpha(const ExperimentTable& table, Algorithm algorithm);

// Per algorithm: NoDC, best alpha-DC, delta.
void write_comparison_table(std::ostream& out, const ExperimentTable& table);
// Per algorithm six metric rows, one column per alpha > 0.
void write_alpha_table(std::ostream& out, const ExperimentTable& table);
// One row per (algorithm, alpha) including the NoDC baselines.
inline constexpr const char* kSweepCsvHeader =
    "algorithm,alpha,f1,accuracy,precision,recall,fpr,fnr,"
    "delta_f1,delta_accuracy,delta_precision,delta_recall,delta_fpr,delta_fnr";
void write_sweep_csv(std::ostream& out, const ExperimentTable& table);
nlohmann::ordered_json experiment_json(const ExperimentTable& table);

inline constexpr const char* kStatsCsvHeader = "feature,mean,se,median,sd,kurtosis,skewness,min,max";
void write_stats_csv(std::ostream& out, const std::vector<ColumnStats>& stats);
void write_stats_text(std::ostream& out, const std::vector<ColumnStats>& stats);
nlohmann::ordered_json stats_json(const std::vector<ColumnStats>& stats);

}  // namespace geocoherence
