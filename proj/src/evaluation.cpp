#include "geocoherence/evaluation.hpp"

#include <algorithm>
#include <set>

#include "geocoherence/error.hpp"
#include "geocoherence/random.hpp"

namespace geocoherence {

LabelEncoding::LabelEncoding(std::span<const std::string> labels) {
  const std::set<std::string> distinct(labels.begin(), labels.end());
  classes_.assign(distinct.begin(), distinct.end());
}

int LabelEncoding::encode(const std::string& label) const {
  const auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
  if (it == classes_.end() || *it != label) throw Error("unknown label '" + label + "'");
  return static_cast<int>(it - classes_.begin());
}

std::vector<int> LabelEncoding::encode(std::span<const std::string> labels) const {
  std::vector<int> codes;
  codes.reserve(labels.size());
  for (const auto& l : labels) codes.push_back(encode(l));
  return codes;
}

const std::string& LabelEncoding::decode(int code) const {
  if (code < 0 || static_cast<std::size_t>(code) >= classes_.size()) {
    throw Error("label code " + std::to_string(code) + " out of range");
  }
  return classes_[static_cast<std::size_t>(code)];
}

LabelEncoding encode_labels(std::span<const std::string> labels) { return LabelEncoding(labels); }

std::vector<std::size_t> FoldAssignment::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of.size(); ++r) {
    if (fold_of[r] == fold) rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of.size(); ++r) {
    if (fold_of[r] != fold) rows.push_back(r);
  }
  return rows;
}

FoldAssignment stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be >= 2");
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.fold_of.assign(labels.size(), 0);
  if (labels.empty()) return folds;

  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);

  const int top = *std::max_element(labels.begin(), labels.end());
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(top) + 1);
  for (const auto r : order) by_class[static_cast<std::size_t>(labels[r])].push_back(r);

  std::size_t next = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto& rows = by_class[c];
    if (!rows.empty() && rows.size() < k) folds.small_classes.push_back(static_cast<int>(c));
    for (const auto r : rows) {
      folds.fold_of[r] = next;
      next = (next + 1) % k;
    }
  }
  return folds;
}

void ConfusionMatrix::add(int truth, int predicted, std::uint64_t count) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= n_ ||
      static_cast<std::size_t>(predicted) >= n_) {
    throw Error("class index outside the confusion matrix");
  }
  counts_[static_cast<std::size_t>(truth) * n_ + static_cast<std::size_t>(predicted)] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto c : counts_) sum += c;
  return sum;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t sum = 0;
  for (std::size_t c = 0; c < n_; ++c) sum += counts_[c * n_ + c];
  return sum;
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<std::uint64_t>>& rows) {
  ConfusionMatrix cm(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != rows.size()) throw Error("confusion matrix must be square");
    for (std::size_t p = 0; p < rows.size(); ++p) {
      cm.add(static_cast<int>(t), static_cast<int>(p), rows[t][p]);
    }
  }
  return cm;
}

ClassMetrics binary_metrics(const BinaryCounts& b) {
  auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  ClassMetrics m;
  m.counts = b;
  m.support = b.tp + b.fn;
  m.precision = ratio(b.tp, b.tp + b.fp);
  m.recall = ratio(b.tp, b.tp + b.fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.fpr = ratio(b.fp, b.fp + b.tn);
  m.fnr = ratio(b.fn, b.fn + b.tp);
  return m;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
  const auto n = cm.class_count();
  const auto total = cm.total();
  std::vector<ClassMetrics> out;
  out.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    const int ci = static_cast<int>(c);
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    for (std::size_t o = 0; o < n; ++o) {
      row += cm.at(ci, static_cast<int>(o));
      col += cm.at(static_cast<int>(o), ci);
    }
    BinaryCounts b;
    b.tp = cm.at(ci, ci);
    b.fn = row - b.tp;
    b.fp = col - b.tp;
    b.tn = total - b.tp - b.fn - b.fp;
    out.push_back(binary_metrics(b));
  }
  return out;
}

MetricsReport weighted_metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw Error("cannot score an empty confusion matrix");
  MetricsReport r;
  for (const auto& m : per_class_metrics(cm)) {
    const double w = static_cast<double>(m.support);
    r.precision += w * m.precision;
    r.recall += w * m.recall;
    r.f1 += w * m.f1;
    r.fpr += w * m.fpr;
    r.fnr += w * m.fnr;
  }
  const double n = static_cast<double>(total);
  r.precision /= n;
  r.recall /= n;
  r.f1 /= n;
  r.fpr /= n;
  r.fnr /= n;
  r.accuracy = static_cast<double>(cm.trace()) / n;
  return r;
}

MetricsReport difference(const MetricsReport& a, const MetricsReport& b) {
  return {a.f1 - b.f1,         a.accuracy - b.accuracy, a.precision - b.precision,
          a.recall - b.recall, a.fpr - b.fpr,           a.fnr - b.fnr};
}

CrossValidationResult cross_validate(const MatrixView& features, std::span<const int> labels,
                                     std::size_t n_classes, const EnsembleConfig& model,
                                     std::size_t k, std::uint64_t fold_seed) {
  if (labels.size() != features.rows) throw Error("labels do not match the row count");
  if (features.rows == 0) throw TrainingError("cannot cross-validate an empty table");
  CrossValidationResult result{{}, ConfusionMatrix(n_classes), stratified_folds(labels, k, fold_seed), 0};

  std::vector<double> train_values;
  std::vector<int> train_labels;
  for (std::size_t fold = 0; fold < k; ++fold) {
    const auto test = result.folds.test_rows(fold);
    if (test.empty()) continue;
    const auto train = result.folds.train_rows(fold);
    if (train.empty()) throw TrainingError("fold " + std::to_string(fold) + " has no training rows");

    train_values.clear();
    train_labels.clear();
    for (const auto r : train) {
      const auto row = features.row(r);
      train_values.insert(train_values.end(), row.begin(), row.end());
      train_labels.push_back(labels[r]);
    }
    EnsembleConfig fold_model = model;
    fold_model.seed = derive_seed(model.seed, fold);
    const auto ensemble =
        train_ensemble(MatrixView(train_values, train.size(), features.cols), train_labels,
                       fold_model, n_classes);
    for (const auto r : test) {
      result.confusion.add(labels[r], ensemble.predict(features.row(r)).label);
    }
  }
  result.metrics = weighted_metrics(result.confusion);
  return result;
}

CrossValidationResult cross_validate(const Dataset& dataset, const ExtractionConfig& extraction,
                                     const EnsembleConfig& model, std::size_t k,
                                     std::uint64_t fold_seed) {
  if (dataset.empty()) throw TrainingError("cannot cross-validate an empty dataset");
  const auto matrix = extract_feature_matrix(dataset, extraction);
  const auto encoding = encode_labels(matrix.labels);
  const auto codes = encoding.encode(matrix.labels);
  auto result = cross_validate(matrix.view(), codes, encoding.class_count(), model, k, fold_seed);
  result.filled_cells = matrix.filled_cells;
  return result;
}

std::size_t default_alpha(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRandomForest: return 3;
    case Algorithm::kExtraTrees: return 4;
    case Algorithm::kBagging: return 5;
  }
  return 3;
}

const ExperimentCell* ExperimentTable::find(Algorithm algorithm, std::size_t alpha) const {
  for (const auto& cell : cells) {
    if (cell.algorithm == algorithm && cell.alpha == alpha) return &cell;
  }
  return nullptr;
}

ExperimentTable run_experiment(const Dataset& dataset, const ExperimentConfig& config) {
  if (config.algorithms.empty()) throw ConfigError("no algorithms selected");
  if (config.alphas.empty()) throw ConfigError("alpha list is empty");
  if (dataset.empty()) throw TrainingError("cannot run an experiment on an empty dataset");

  std::vector<std::size_t> alphas = config.alphas;
  alphas.push_back(0);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  // dc_z does not depend on alpha, so one extraction at the largest alpha
  // serves every cell through its leading columns.
  ExtractionConfig extraction = config.extraction;
  extraction.alpha = alphas.back();
  const auto full = extract_feature_matrix(dataset, extraction);
  const auto encoding = encode_labels(full.labels);
  const auto codes = encoding.encode(full.labels);

  ExperimentTable table;
  table.config = config;
  table.rows = full.rows();
  table.classes = encoding.class_count();
  table.small_classes = stratified_folds(codes, config.k, config.fold_seed).small_classes;

  for (const auto algorithm : config.algorithms) {
    MetricsReport baseline;
    for (const auto alpha : alphas) {
      const auto matrix = full.leading_columns(kBaseFeatureCount + alpha);
      EnsembleConfig model = config.model;
      model.algorithm = algorithm;
      const auto cv = cross_validate(matrix.view(), codes, encoding.class_count(), model, config.k,
                                     config.fold_seed);
      if (alpha == 0) baseline = cv.metrics;
      table.cells.push_back({algorithm, alpha, cv.metrics, difference(cv.metrics, baseline)});
    }
  }
  return table;
}

}  // namespace geocoherence
