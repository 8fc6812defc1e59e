#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "geocoherence/error.hpp"
#include "geocoherence/evaluation.hpp"
#include "oracles.hpp"

using namespace geocoherence;

TEST_CASE("label encoding sorts labels") {
  const std::vector<std::string> labels{"user2", "user1", "user2"};
  const auto enc = encode_labels(labels);
  CHECK(enc.class_count() == 2);
  CHECK(enc.encode(labels) == std::vector<int>{1, 0, 1});
  CHECK(enc.decode(0) == "user1");
  CHECK_THROWS_AS(enc.encode(std::string("user9")), Error);

  const std::vector<std::string> one(4, "solo");
  CHECK(encode_labels(one).encode(one) == std::vector<int>(4, 0));

  std::vector<std::string> many;
  for (int i = 0; i < 348; ++i) many.push_back("u" + std::to_string(i));
  const auto big = encode_labels(many);
  CHECK(big.class_count() == 348);
  std::set<int> codes;
  for (const auto c : big.encode(many)) codes.insert(c);
  CHECK(codes.size() == 348);
  CHECK(*codes.begin() == 0);
  CHECK(*codes.rbegin() == 347);
}

TEST_CASE("stratified folds divide exactly when they can") {
  std::vector<int> labels(8, 0);
  labels.insert(labels.end(), 4, 1);
  const auto folds = stratified_folds(labels, 4, 3);
  for (std::size_t f = 0; f < 4; ++f) {
    std::map<int, int> count;
    for (const auto r : folds.test_rows(f)) ++count[labels[r]];
    CHECK(count[0] == 2);
    CHECK(count[1] == 1);
  }
  CHECK(folds.small_classes.empty());
}

TEST_CASE("a class smaller than k lands in distinct folds and is flagged") {
  std::vector<int> labels(50, 0);
  labels.insert(labels.end(), 3, 1);
  const auto folds = stratified_folds(labels, 10, 1);
  std::set<std::size_t> used;
  for (std::size_t r = 50; r < 53; ++r) used.insert(folds.fold_of[r]);
  CHECK(used.size() == 3);
  CHECK(folds.small_classes == std::vector<int>{1});
}

TEST_CASE("fold assignment is a function of the seed") {
  std::vector<int> labels;
  for (int i = 0; i < 97; ++i) labels.push_back(i % 5);
  const auto a = stratified_folds(labels, 5, 11);
  const auto b = stratified_folds(labels, 5, 11);
  const auto c = stratified_folds(labels, 5, 12);
  CHECK(a.fold_of == b.fold_of);
  CHECK(a.fold_of != c.fold_of);
  CHECK_THROWS_AS(stratified_folds(labels, 1, 0), ConfigError);
}

TEST_CASE("train and test rows partition") {
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(i % 3);
  const auto folds = stratified_folds(labels, 4, 2);
  std::vector<int> seen(labels.size(), 0);
  for (std::size_t f = 0; f < 4; ++f) {
    const auto test = folds.test_rows(f);
    const auto train = folds.train_rows(f);
    CHECK(test.size() + train.size() == labels.size());
    for (const auto r : test) ++seen[r];
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
}

TEST_CASE("binary rates") {
  const auto m = binary_metrics(BinaryCounts{9, 1, 1, 89});
  CHECK(m.precision == doctest::Approx(0.9));
  CHECK(m.recall == doctest::Approx(0.9));
  CHECK(m.f1 == doctest::Approx(0.9));
  CHECK(m.fpr == doctest::Approx(1.0 / 90.0));
  CHECK(m.fnr == doctest::Approx(0.1));

  const auto empty = binary_metrics(BinaryCounts{0, 0, 0, 5});
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);
  CHECK(empty.fnr == 0.0);
}

TEST_CASE("perfect diagonal") {
  const auto cm = ConfusionMatrix::from_rows({{5, 0, 0}, {0, 2, 0}, {0, 0, 7}});
  const auto m = weighted_metrics(cm);
  CHECK(m.accuracy == 1.0);
  CHECK(m.fnr == 0.0);
  CHECK(m.fpr == 0.0);
  CHECK(m.f1 == 1.0);
}

TEST_CASE("three-class matrix against the hand count") {
  const std::vector<std::vector<std::uint64_t>> rows{{2, 1, 0}, {0, 3, 0}, {1, 0, 3}};
  const auto m = weighted_metrics(ConfusionMatrix::from_rows(rows));
  const auto h = oracle::hand_count(rows);
  CHECK(m.accuracy == doctest::Approx(h.accuracy).epsilon(1e-12));
  CHECK(m.precision == doctest::Approx(h.precision).epsilon(1e-12));
  CHECK(m.recall == doctest::Approx(h.recall).epsilon(1e-12));
  CHECK(m.f1 == doctest::Approx(h.f1).epsilon(1e-12));
  CHECK(m.fpr == doctest::Approx(h.fpr).epsilon(1e-12));
  CHECK(m.fnr == doctest::Approx(h.fnr).epsilon(1e-12));
  CHECK(m.accuracy == doctest::Approx(0.8));
  CHECK(m.recall == doctest::Approx(0.8));
  CHECK_THROWS_AS(weighted_metrics(ConfusionMatrix(3)), Error);
}

TEST_CASE("per-class F1 lies between precision and recall") {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<int> cell(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<std::uint64_t>> rows(4, std::vector<std::uint64_t>(4));
    for (auto& r : rows) {
      for (auto& v : r) v = static_cast<std::uint64_t>(cell(gen));
    }
    for (const auto& c : per_class_metrics(ConfusionMatrix::from_rows(rows))) {
      CHECK(c.f1 >= std::min(c.precision, c.recall) - 1e-15);
      CHECK(c.f1 <= std::max(c.precision, c.recall) + 1e-15);
    }
  }
}

TEST_CASE("difference of reports") {
  MetricsReport a{0.9, 0.9, 0.9, 0.9, 0.01, 0.1};
  const auto zero = difference(a, a);
  CHECK(zero == MetricsReport{});
}

TEST_CASE("separable users are classified almost perfectly") {
  std::vector<GpsSample> samples;
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, 0.001);
  for (int u = 0; u < 2; ++u) {
    for (int i = 0; i < 100; ++i) {
      samples.push_back({"u" + std::to_string(u), oracle::at(2017, 1, 1 + i % 28, i % 24, i % 60),
                         10.0 * u + noise(gen), 20.0 - 10.0 * u + noise(gen)});
    }
  }
  ExtractionConfig ext;
  ext.alpha = 3;
  EnsembleConfig model;
  model.n_estimators = 20;
  const auto r = cross_validate(Dataset(samples), ext, model, 5, 0);
  CHECK(r.metrics.accuracy >= 0.99);
  CHECK(r.confusion.total() == 200);
}

TEST_CASE("indistinguishable classes sit near chance") {
  std::vector<double> values(400, 1.0);
  std::vector<int> labels;
  for (int i = 0; i < 400; ++i) labels.push_back(i % 2);
  EnsembleConfig model;
  model.n_estimators = 10;
  const auto r = cross_validate(MatrixView(values, 400, 1), labels, 2, model, 10, 5);
  CHECK(r.metrics.accuracy >= 0.4);
  CHECK(r.metrics.accuracy <= 0.6);
}

TEST_CASE("cross validation is reproducible and thread independent") {
  SynthConfig cfg;
  cfg.n_users = 5;
  cfg.samples_per_user = 80;
  const auto d = generate_dataset(cfg);
  ExtractionConfig ext;
  ext.alpha = 3;
  EnsembleConfig model;
  model.n_estimators = 15;
  model.seed = 4;
  model.threads = 1;
  const auto a = cross_validate(d, ext, model, 4, 9);
  model.threads = 3;
  const auto b = cross_validate(d, ext, model, 4, 9);
  CHECK(a.metrics == b.metrics);
  CHECK(a.folds.fold_of == b.folds.fold_of);
  CHECK(a.confusion.total() == d.size());
  CHECK(a.metrics.recall == doctest::Approx(a.metrics.accuracy).epsilon(1e-12));
}

TEST_CASE("default alpha per algorithm") {
  CHECK(default_alpha(Algorithm::kRandomForest) == 3);
  CHECK(default_alpha(Algorithm::kExtraTrees) == 4);
  CHECK(default_alpha(Algorithm::kBagging) == 5);
}

TEST_CASE("experiment table structure") {
  SynthConfig cfg;
  cfg.n_users = 4;
  cfg.samples_per_user = 40;
  const auto d = generate_dataset(cfg);

  ExperimentConfig exp;
  exp.algorithms = {Algorithm::kRandomForest, Algorithm::kExtraTrees};
  exp.alphas = {1, 2, 3, 4, 5, 6};
  exp.model.n_estimators = 5;
  exp.k = 3;
  const auto table = run_experiment(d, exp);
  CHECK(table.cells.size() == 14);
  CHECK(table.rows == 160);
  CHECK(table.classes == 4);
  for (const auto a : exp.algorithms) {
    const auto* base = table.find(a, 0);
    REQUIRE(base);
    CHECK(base->delta == MetricsReport{});
    for (std::size_t z = 1; z <= 6; ++z) {
      const auto* cell = table.find(a, z);
      REQUIRE(cell);
      CHECK(cell->delta.f1 == doctest::Approx(cell->metrics.f1 - base->metrics.f1));
    }
  }

  // The cells match standalone cross-validation runs.
  ExtractionConfig ext;
  ext.alpha = 2;
  EnsembleConfig model = exp.model;
  model.algorithm = Algorithm::kExtraTrees;
  const auto direct = cross_validate(d, ext, model, exp.k, exp.fold_seed);
  CHECK(table.find(Algorithm::kExtraTrees, 2)->metrics == direct.metrics);

  ExperimentConfig only_base = exp;
  only_base.alphas = {0};
  only_base.algorithms = {Algorithm::kBagging};
  const auto t0 = run_experiment(d, only_base);
  REQUIRE(t0.cells.size() == 1);
  CHECK(t0.cells[0].delta == MetricsReport{});
}
