#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geocoherence/data.hpp"
#include "geocoherence/ensemble.hpp"
#include "geocoherence/features.hpp"

namespace geocoherence {

// Bijection between user labels and codes 0..q-1, assigned in sorted label order.
class LabelEncoding {
 public:
  LabelEncoding() = default;
  explicit LabelEncoding(std::span<const std::string> labels);

  std::size_t class_count() const { return classes_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }

  // Throws Error for a label that was not seen at construction.
  int encode(const std::string& label) const;
  std::vector<int> encode(std::span<const std::string> labels) const;
  const std::string& decode(int code) const;

 private:
  std::vector<std::string> classes_;
};

LabelEncoding encode_labels(std::span<const std::string> labels);

struct FoldAssignment {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // per row, in [0, k)
  // Classes with fewer rows than folds (some folds will not hold them).
  std::vector<int> small_classes;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

// Shuffles rows by seed, then deals each class's rows round-robin over the
// folds. The dealing position carries over from one class to the next, so
// fold sizes also differ by at most one. Throws ConfigError for k < 2.
FoldAssignment stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes = 0)
      : n_(n_classes), counts_(n_classes * n_classes, 0) {}

  void add(int truth, int predicted, std::uint64_t count = 1);
  std::uint64_t at(int truth, int predicted) const {
    return counts_[static_cast<std::size_t>(truth) * n_ + static_cast<std::size_t>(predicted)];
  }
  std::size_t class_count() const { return n_; }
  std::uint64_t total() const;
  std::uint64_t trace() const;

  static ConfusionMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows);

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
};

// One-vs-rest counts for a single class.
struct BinaryCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

struct ClassMetrics {
  BinaryCounts counts;
  std::uint64_t support = 0;  // true instances
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
};

// Rates of one binary table. A rate whose denominator is zero is 0.
ClassMetrics binary_metrics(const BinaryCounts& counts);
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);

// Support-weighted aggregates; all values are fractions in [0, 1].
struct MetricsReport {
  double f1 = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

// Throws Error for an empty matrix.
MetricsReport weighted_metrics(const ConfusionMatrix& cm);
MetricsReport difference(const MetricsReport& a, const MetricsReport& b);  // a - b

struct CrossValidationResult {
  MetricsReport metrics;
  ConfusionMatrix confusion;
  FoldAssignment folds;
  std::size_t filled_cells = 0;
};

// Pooled k-fold evaluation of an already extracted table: every row is
// predicted once by the model trained on the other folds. Fold f trains with
// seed derive_seed(model.seed, f).
CrossValidationResult cross_validate(const MatrixView& features, std::span<const int> labels,
                                     std::size_t n_classes, const EnsembleConfig& model,
                                     std::size_t k, std::uint64_t fold_seed);

// Extracts features once over the whole dataset, then cross-validates.
CrossValidationResult cross_validate(const Dataset& dataset, const ExtractionConfig& extraction,
                                     const EnsembleConfig& model, std::size_t k,
                                     std::uint64_t fold_seed);

// Best alpha per algorithm used as the default.
std::size_t default_alpha(Algorithm algorithm);

struct ExperimentConfig {
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> alphas;  // 0 = NoDC; always evaluated as the baseline
  ExtractionConfig extraction;      // alpha is overridden per cell
  EnsembleConfig model;             // algorithm is overridden per cell
  std::size_t k = 10;
  std::uint64_t fold_seed = 0;
};

struct ExperimentCell {
  Algorithm algorithm = Algorithm::kRandomForest;
  std::size_t alpha = 0;
  MetricsReport metrics;
  MetricsReport delta;  // metrics minus the algorithm's NoDC metrics
};

struct ExperimentTable {
  ExperimentConfig config;
  std::vector<ExperimentCell> cells;  // per algorithm: NoDC first, then ascending alpha
  std::size_t rows = 0;
  std::size_t classes = 0;
  std::vector<int> small_classes;

  const ExperimentCell* find(Algorithm algorithm, std::size_t alpha) const;
};

ExperimentTable run_experiment(const Dataset& dataset, const ExperimentConfig& config);

}  // namespace geocoherence
