#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "geocoherence/features.hpp"
#include "geocoherence/report.hpp"

using namespace geocoherence;

namespace {

// Moment-based sample estimators written out directly.
struct Reference {
  double mean, sd, skew, kurt;
};

Reference reference(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (const double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double s2 = m2 / (n - 1);
  const double s = std::sqrt(s2);
  const double skew = n / ((n - 1) * (n - 2)) * m3 / (s2 * s);
  const double kurt = n * (n + 1) / ((n - 1) * (n - 2) * (n - 3)) * m4 / (s2 * s2) -
                      3 * (n - 1) * (n - 1) / ((n - 2) * (n - 3));
  return {mean, s, skew, kurt};
}

}  // namespace

TEST_CASE("column 1,2,3,4") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = column_statistics("x", v);
  CHECK(s.count == 4);
  CHECK(*s.mean == doctest::Approx(2.5));
  CHECK(*s.median == doctest::Approx(2.5));
  CHECK(*s.standard_deviation == doctest::Approx(1.2909944).epsilon(1e-7));
  CHECK(*s.standard_error == doctest::Approx(0.6454972).epsilon(1e-7));
  CHECK(*s.skewness == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(*s.kurtosis == doctest::Approx(-1.2).epsilon(1e-12));
  CHECK(*s.min == 1);
  CHECK(*s.max == 4);
}

TEST_CASE("constant column") {
  const std::vector<double> v(10, 3.5);
  const auto s = column_statistics("c", v);
  CHECK(*s.standard_deviation == 0.0);
  CHECK(*s.min == 3.5);
  CHECK(*s.max == 3.5);
  CHECK(*s.mean == 3.5);
  CHECK_FALSE(s.skewness);
  CHECK_FALSE(s.kurtosis);
}

TEST_CASE("short columns leave higher moments undefined") {
  const std::vector<double> one{7};
  const auto a = column_statistics("a", one);
  CHECK(*a.mean == 7);
  CHECK(*a.median == 7);
  CHECK_FALSE(a.standard_deviation);
  CHECK_FALSE(a.standard_error);

  const std::vector<double> three{1, 2, 10};
  const auto b = column_statistics("b", three);
  CHECK(b.skewness);
  CHECK_FALSE(b.kurtosis);
  CHECK(*b.median == 2);

  const auto empty = column_statistics("e", std::vector<double>{});
  CHECK(empty.count == 0);
  CHECK_FALSE(empty.mean);
}

TEST_CASE("statistics agree with the moment formulas") {
  std::mt19937_64 gen(3);
  std::lognormal_distribution<double> dist(0.0, 0.7);
  std::vector<double> v(997);
  for (auto& x : v) x = dist(gen);
  const auto s = column_statistics("x", v);
  const auto r = reference(v);
  CHECK(*s.mean == doctest::Approx(r.mean).epsilon(1e-12));
  CHECK(*s.standard_deviation == doctest::Approx(r.sd).epsilon(1e-12));
  CHECK(*s.skewness == doctest::Approx(r.skew).epsilon(1e-9));
  CHECK(*s.kurtosis == doctest::Approx(r.kurt).epsilon(1e-9));
  CHECK(*s.standard_error == doctest::Approx(r.sd / std::sqrt(997.0)).epsilon(1e-12));
}

TEST_CASE("distribution table covers every column") {
  FeatureMatrix m({"a", "b"}, 3);
  m.at(0, 0) = 1;
  m.at(1, 0) = 2;
  m.at(2, 0) = 3;
  m.at(0, 1) = m.at(1, 1) = m.at(2, 1) = 5;
  const auto stats = feature_distribution(m);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].name == "a");
  CHECK(*stats[1].standard_deviation == 0.0);

  std::ostringstream csv;
  write_stats_csv(csv, stats);
  CHECK(csv.str() ==
        "feature,mean,se,median,sd,kurtosis,skewness,min,max\n"
        "a,2,0.577350269,2,1,,0,1,3\n"
        "b,5,0,5,0,,,5,5\n");
}
