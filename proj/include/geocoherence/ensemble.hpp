#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "geocoherence/matrix.hpp"
#include "geocoherence/random.hpp"

namespace geocoherence {

enum class Algorithm { kRandomForest, kExtraTrees, kBagging };

// Accepts rf/randomforest, et/extratrees, bagging.
std::optional<Algorithm> algorithm_from_name(std::string_view name);
// Short name: "rf", "extratrees", "bagging".
std::string_view algorithm_name(Algorithm algorithm);
// "RandomForest", "ExtraTrees", "Bagging".
std::string_view algorithm_title(Algorithm algorithm);

enum class MaxFeatures { kSqrt, kAll };
enum class SplitRule { kOptimal, kRandom };

struct EnsembleConfig {
  Algorithm algorithm = Algorithm::kRandomForest;
  std::size_t n_estimators = 100;
  // Unset fields follow the algorithm: rf and extratrees draw floor(sqrt(F))
  // candidates per node, bagging uses all; rf and bagging bootstrap,
  // extratrees trains every tree on the full set.
  std::optional<MaxFeatures> max_features;
  std::optional<bool> bootstrap;
  std::size_t min_samples_split = 2;
  std::optional<std::size_t> max_depth;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  MaxFeatures effective_max_features() const;
  bool effective_bootstrap() const;
  SplitRule split_rule() const;
  // Number of candidate features examined per node for a table of width n.
  std::size_t candidate_count(std::size_t n_features) const;
  void validate() const;
};

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;  // rows with value <= threshold go left
  double gain = 0.0;       // Gini impurity decrease, > 0
};

// Splits with a smaller impurity decrease are treated as no split.
inline constexpr double kMinSplitGain = 1e-12;

// n positions drawn uniformly from [0, n) with replacement.
std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng);

// Best (feature, threshold) over the candidates, thresholds at midpoints of
// consecutive distinct values. Ties go to the lower feature index, then the
// lower threshold. nullopt when nothing reduces impurity.
std::optional<Split> find_optimal_split(const MatrixView& rows, std::span<const int> labels,
                                        std::size_t n_classes,
                                        std::span<const std::size_t> candidate_features);

// One uniform threshold per candidate feature inside its (min, max) range,
// best of those cuts wins. Constant features are skipped without a draw.
std::optional<Split> find_random_split(const MatrixView& rows, std::span<const int> labels,
                                       std::size_t n_classes,
                                       std::span<const std::size_t> candidate_features, Rng& rng);

struct TreeParams {
  SplitRule rule = SplitRule::kOptimal;
  std::size_t max_features = 0;  // 0 = all
  bool bootstrap = false;
  std::size_t min_samples_split = 2;
  std::optional<std::size_t> max_depth;
};

class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf = -1;  // index into the leaf distributions

    bool is_leaf() const { return feature < 0; }
    bool operator==(const Node&) const = default;
  };

  DecisionTree() = default;
  DecisionTree(std::size_t n_classes, std::size_t n_features, std::vector<Node> nodes,
               std::vector<double> leaf_values);

  static DecisionTree train(const MatrixView& rows, std::span<const int> labels,
                            std::size_t n_classes, const TreeParams& params, Rng& rng);

  // Class-frequency vector of the leaf reached by `row`.
  std::span<const double> predict_proba(std::span<const double> row) const;

  std::size_t n_classes() const { return n_classes_; }
  std::size_t n_features() const { return n_features_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<double>& leaf_values() const { return leaf_values_; }
  std::size_t leaf_count() const { return n_classes_ == 0 ? 0 : leaf_values_.size() / n_classes_; }
  std::size_t depth() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::size_t n_classes_ = 0;
  std::size_t n_features_ = 0;
  std::vector<Node> nodes_;
  std::vector<double> leaf_values_;
};

struct Prediction {
  std::vector<double> probabilities;
  int label = 0;
};

// Argmax with ties broken toward the lowest class.
int argmax_label(std::span<const double> probabilities);

class EnsembleModel {
 public:
  EnsembleModel() = default;
  EnsembleModel(EnsembleConfig config, std::size_t n_classes, std::size_t n_features,
                std::vector<DecisionTree> trees);

  // Mean of the per-tree leaf distributions. Throws Error on width mismatch.
  Prediction predict(std::span<const double> row) const;

  const EnsembleConfig& config() const { return config_; }
  std::size_t n_classes() const { return n_classes_; }
  std::size_t n_features() const { return n_features_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  EnsembleConfig config_;
  std::size_t n_classes_ = 0;
  std::size_t n_features_ = 0;
  std::vector<DecisionTree> trees_;
};

// Trains config.n_estimators trees; tree t uses Rng(derive_seed(config.seed, t)).
// n_classes = 0 infers max(label) + 1. Throws TrainingError on empty input.
EnsembleModel train_ensemble(const MatrixView& rows, std::span<const int> labels,
                             const EnsembleConfig& config, std::size_t n_classes = 0);

// Versioned JSON document. Thresholds and leaf values round-trip exactly.
void save_model(std::ostream& out, const EnsembleModel& model);
EnsembleModel load_model(std::istream& in);

}  // namespace geocoherence
