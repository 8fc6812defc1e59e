#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "geocoherence/ensemble.hpp"
#include "geocoherence/error.hpp"
#include "geocoherence/parallel.hpp"
#include "tree_builder.hpp"

namespace geocoherence {

std::optional<Algorithm> algorithm_from_name(std::string_view name) {
  if (name == "rf" || name == "randomforest" || name == "RandomForest") return Algorithm::kRandomForest;
  if (name == "et" || name == "extratrees" || name == "ExtraTrees") return Algorithm::kExtraTrees;
  if (name == "bagging" || name == "Bagging") return Algorithm::kBagging;
  return std::nullopt;
}

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRandomForest: return "rf";
    case Algorithm::kExtraTrees: return "extratrees";
    case Algorithm::kBagging: return "bagging";
  }
  return "?";
}

std::string_view algorithm_title(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRandomForest: return "RandomForest";
    case Algorithm::kExtraTrees: return "ExtraTrees";
    case Algorithm::kBagging: return "Bagging";
  }
  return "?";
}

MaxFeatures EnsembleConfig::effective_max_features() const {
  if (max_features) return *max_features;
  return algorithm == Algorithm::kBagging ? MaxFeatures::kAll : MaxFeatures::kSqrt;
}

bool EnsembleConfig::effective_bootstrap() const {
  if (bootstrap) return *bootstrap;
  return algorithm != Algorithm::kExtraTrees;
}

SplitRule EnsembleConfig::split_rule() const {
  return algorithm == Algorithm::kExtraTrees ? SplitRule::kRandom : SplitRule::kOptimal;
}

std::size_t EnsembleConfig::candidate_count(std::size_t n_features) const {
  if (effective_max_features() == MaxFeatures::kAll) return n_features;
  const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
  return std::max<std::size_t>(1, root);
}

void EnsembleConfig::validate() const {
  if (n_estimators < 1) throw ConfigError("n_estimators must be >= 1");
  if (min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
}

int argmax_label(std::span<const double> probabilities) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < probabilities.size(); ++c) {
    if (probabilities[c] > probabilities[best]) best = c;
  }
  return static_cast<int>(best);
}

EnsembleModel::EnsembleModel(EnsembleConfig config, std::size_t n_classes, std::size_t n_features,
                             std::vector<DecisionTree> trees)
    : config_(std::move(config)), n_classes_(n_classes), n_features_(n_features), trees_(std::move(trees)) {}

Prediction EnsembleModel::predict(std::span<const double> row) const {
  if (row.size() != n_features_) {
    throw Error("row has " + std::to_string(row.size()) + " features, model expects " +
                std::to_string(n_features_));
  }
  Prediction out;
  out.probabilities.assign(n_classes_, 0.0);
  for (const auto& tree : trees_) {
    const auto leaf = tree.predict_proba(row);
    for (std::size_t c = 0; c < n_classes_; ++c) out.probabilities[c] += leaf[c];
  }
  const double n = static_cast<double>(trees_.size());
  for (auto& p : out.probabilities) p /= n;
  out.label = argmax_label(out.probabilities);
  return out;
}

EnsembleModel train_ensemble(const MatrixView& rows, std::span<const int> labels,
                             const EnsembleConfig& config, std::size_t n_classes) {
  config.validate();
  if (rows.rows == 0 || rows.cols == 0) throw TrainingError("cannot train on an empty feature table");
  if (labels.size() != rows.rows) throw TrainingError("labels do not match the row count");
  if (n_classes == 0) {
    const int top = *std::max_element(labels.begin(), labels.end());
    if (top < 0) throw TrainingError("negative label");
    n_classes = static_cast<std::size_t>(top) + 1;
  }
  for (const int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes) {
      throw TrainingError("label " + std::to_string(y) + " outside [0, n_classes)");
    }
  }

  const TreeParams params{config.split_rule(), config.candidate_count(rows.cols),
                          config.effective_bootstrap(), config.min_samples_split, config.max_depth};
  const detail::ColumnStore store(rows);
  std::vector<DecisionTree> trees(config.n_estimators);
  parallel_for(trees.size(), config.threads, [&](std::size_t t) {
    Rng rng(derive_seed(config.seed, t));
    trees[t] = detail::grow_tree(store, labels, n_classes, params, rng);
  });
  return EnsembleModel(config, n_classes, rows.cols, std::move(trees));
}

namespace {

constexpr const char* kModelFormat = "geocoherence-ensemble";
constexpr int kModelVersion = 1;

}  // namespace

void save_model(std::ostream& out, const EnsembleModel& model) {
  using nlohmann::json;
  const auto& cfg = model.config();
  json doc;
  doc["format"] = kModelFormat;
  doc["version"] = kModelVersion;
  doc["algorithm"] = algorithm_name(cfg.algorithm);
  doc["n_estimators"] = cfg.n_estimators;
  doc["max_features"] = cfg.effective_max_features() == MaxFeatures::kAll ? "all" : "sqrt";
  doc["bootstrap"] = cfg.effective_bootstrap();
  doc["min_samples_split"] = cfg.min_samples_split;
  doc["max_depth"] = cfg.max_depth ? json(*cfg.max_depth) : json(nullptr);
  doc["seed"] = cfg.seed;
  doc["n_classes"] = model.n_classes();
  doc["n_features"] = model.n_features();
  json trees = json::array();
  for (const auto& tree : model.trees()) {
    json t;
    std::vector<int> feature, left, right, leaf;
    std::vector<double> threshold;
    for (const auto& n : tree.nodes()) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      leaf.push_back(n.leaf);
    }
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["left"] = left;
    t["right"] = right;
    t["leaf"] = leaf;
    t["leaf_values"] = tree.leaf_values();
    trees.push_back(std::move(t));
  }
  doc["trees"] = std::move(trees);
  out << doc.dump() << '\n';
}

EnsembleModel load_model(std::istream& in) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(in);
    if (doc.at("format") != kModelFormat) throw Error("not a geocoherence model");
    if (doc.at("version").get<int>() != kModelVersion) {
      throw Error("unsupported model version " + doc.at("version").dump());
    }
    EnsembleConfig cfg;
    const auto algorithm = algorithm_from_name(doc.at("algorithm").get<std::string>());
    if (!algorithm) throw Error("unknown algorithm in model");
    cfg.algorithm = *algorithm;
    cfg.n_estimators = doc.at("n_estimators").get<std::size_t>();
    cfg.max_features = doc.at("max_features") == "all" ? MaxFeatures::kAll : MaxFeatures::kSqrt;
    cfg.bootstrap = doc.at("bootstrap").get<bool>();
    cfg.min_samples_split = doc.at("min_samples_split").get<std::size_t>();
    if (!doc.at("max_depth").is_null()) cfg.max_depth = doc.at("max_depth").get<std::size_t>();
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    const auto n_classes = doc.at("n_classes").get<std::size_t>();
    const auto n_features = doc.at("n_features").get<std::size_t>();

    std::vector<DecisionTree> trees;
    for (const auto& t : doc.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto leaf = t.at("leaf").get<std::vector<int>>();
      auto values = t.at("leaf_values").get<std::vector<double>>();
      const std::size_t count = feature.size();
      if (threshold.size() != count || left.size() != count || right.size() != count ||
          leaf.size() != count || n_classes == 0 || values.size() % n_classes != 0) {
        throw Error("inconsistent tree arrays");
      }
      const auto leaves = static_cast<int>(values.size() / n_classes);
      std::vector<DecisionTree::Node> nodes(count);
      for (std::size_t i = 0; i < count; ++i) {
        nodes[i] = {feature[i], threshold[i], left[i], right[i], leaf[i]};
        const bool ok = nodes[i].is_leaf()
                            ? leaf[i] >= 0 && leaf[i] < leaves
                            : feature[i] < static_cast<int>(n_features) &&
                                  left[i] > static_cast<int>(i) && left[i] < static_cast<int>(count) &&
                                  right[i] > static_cast<int>(i) && right[i] < static_cast<int>(count);
        if (!ok) throw Error("invalid node " + std::to_string(i));
      }
      trees.emplace_back(n_classes, n_features, std::move(nodes), std::move(values));
    }
    if (trees.size() != cfg.n_estimators) throw Error("tree count does not match n_estimators");
    return EnsembleModel(cfg, n_classes, n_features, std::move(trees));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model: ") + e.what());
  }
}

}  // namespace geocoherence
