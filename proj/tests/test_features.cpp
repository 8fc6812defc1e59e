#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "geocoherence/error.hpp"
#include "geocoherence/features.hpp"
#include "oracles.hpp"

using namespace geocoherence;

namespace {

std::vector<std::size_t> members_of(const Dataset& d, std::size_t i, std::size_t z,
                                    CoherenceMode mode = CoherenceMode::kDaily, bool wrap = false) {
  return coherence_set(d, i, z, mode, wrap).members;
}

using Members = std::vector<std::size_t>;

}  // namespace

TEST_CASE("base features") {
  const GpsSample s{"u", oracle::at(2020, 1, 16, 10, 55), 35.65, 139.70};
  const auto f = extract_base_features(s);
  CHECK(f == std::array<double, 7>{35.65, 139.70, 1, 16, 10, 55, 4});

  const GpsSample midnight{"u", oracle::at(2017, 4, 26, 0, 0), 0, 0};
  const auto g = extract_base_features(midnight);
  CHECK(g[4] == 0);
  CHECK(g[5] == 0);
  CHECK(g[6] >= 1);
  CHECK(g[6] <= 7);
}

TEST_CASE("worked example coherence sets at radius one") {
  const auto d = oracle::worked_example_dataset();
  CHECK(members_of(d, 0, 1) == Members{1});
  CHECK(members_of(d, 1, 1) == Members{0, 2});
  CHECK(members_of(d, 2, 1) == Members{1});
  CHECK(members_of(d, 3, 1) == Members{4, 5, 6});
  CHECK(members_of(d, 4, 1) == Members{3, 5});
  CHECK(members_of(d, 5, 1) == Members{3, 4, 6});
  CHECK(members_of(d, 6, 1) == Members{3, 5});
}

TEST_CASE("radius zero keeps the same hour only") {
  const auto d = oracle::worked_example_dataset();
  CHECK(members_of(d, 3, 0) == Members{5});
  CHECK(members_of(d, 0, 0).empty());
}

TEST_CASE("single-sample user has an empty set") {
  Dataset d({{"solo", oracle::at(2020, 1, 1, 5, 0), 1, 1}, {"other", oracle::at(2020, 1, 1, 5, 0), 2, 2}});
  for (std::size_t z = 0; z <= 24; ++z) CHECK(members_of(d, 0, z).empty());
}

TEST_CASE("distance coherence on the worked example") {
  const auto d = oracle::worked_example_dataset();
  const auto s1 = coherence_set(d, 0, 1, CoherenceMode::kDaily);
  CHECK(distance_coherence(d[0], s1, 0.0) == doctest::Approx(0.01414214).epsilon(1e-7));

  const auto s2 = coherence_set(d, 1, 1, CoherenceMode::kDaily);
  CHECK(s2.centroid_latitude == doctest::Approx(35.645).epsilon(1e-12));
  CHECK(s2.centroid_longitude == doctest::Approx(139.71).epsilon(1e-12));
  CHECK(distance_coherence(d[1], s2, 0.0) == doctest::Approx(0.015).epsilon(1e-10));

  CHECK(distance_coherence(d[0], CoherenceSet{}, 0.25) == 0.25);
}

TEST_CASE("a point on its centroid has zero coherence") {
  Dataset d({{"u", oracle::at(2020, 1, 1, 5, 0), 35.123456, 139.654321},
             {"u", oracle::at(2020, 1, 2, 6, 0), 35.123456, 139.654321},
             {"u", oracle::at(2020, 1, 3, 7, 0), 35.123456, 139.654321}});
  ExtractionConfig cfg;
  cfg.alpha = 6;
  const auto m = extract_feature_matrix(d, cfg);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 7; c < 13; ++c) CHECK(m.at(r, c) == 0.0);
  }
}

TEST_CASE("hour distance") {
  CHECK(hour_distance(23, 0, false) == 23);
  CHECK(hour_distance(23, 0, true) == 1);
  CHECK(hour_distance(3, 15, true) == 12);
  CHECK(hour_distance(10, 10, false) == 0);
}

TEST_CASE("wrap-hours joins late night and early morning") {
  Dataset d({{"u", oracle::at(2020, 1, 1, 23, 10), 1, 1}, {"u", oracle::at(2020, 1, 2, 0, 20), 2, 2}});
  CHECK(members_of(d, 0, 1).empty());
  CHECK(members_of(d, 0, 1, CoherenceMode::kDaily, true) == Members{1});
}

TEST_CASE("weekly mode also requires the same weekday") {
  // 2020-01-16 is a Thursday, 2020-01-23 the next Thursday.
  Dataset d({{"u", oracle::at(2020, 1, 16, 10, 0), 1, 1},
             {"u", oracle::at(2020, 1, 17, 10, 0), 2, 2},
             {"u", oracle::at(2020, 1, 23, 11, 0), 3, 3}});
  CHECK(members_of(d, 0, 1) == Members{1, 2});
  CHECK(members_of(d, 0, 1, CoherenceMode::kWeekly) == Members{2});
  CHECK(members_of(d, 1, 3, CoherenceMode::kWeekly).empty());
}

TEST_CASE("alpha zero is the base table") {
  const auto d = oracle::worked_example_dataset();
  const auto m = extract_feature_matrix(d, ExtractionConfig{});
  REQUIRE(m.cols() == 7);
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto base = extract_base_features(d[r]);
    CHECK(std::equal(base.begin(), base.end(), m.row(r).begin()));
  }
  CHECK(m.filled_cells == 0);
}

TEST_CASE("alpha six gives thirteen named columns") {
  ExtractionConfig cfg;
  cfg.alpha = 6;
  const auto m = extract_feature_matrix(oracle::worked_example_dataset(), cfg);
  CHECK(m.cols() == 13);
  CHECK(m.column_names().back() == "dc_6");
  CHECK(m.column_names().front() == "lat");
  CHECK(m.labels == std::vector<std::string>{"user1", "user1", "user1", "user2", "user2", "user2", "user2"});
}

TEST_CASE("fill and scale apply to coherence columns only") {
  Dataset d({{"a", oracle::at(2020, 1, 1, 1, 0), 1, 1},
             {"b", oracle::at(2020, 1, 1, 1, 0), 2, 2},
             {"b", oracle::at(2020, 1, 1, 2, 0), 2, 2.5}});
  ExtractionConfig cfg;
  cfg.alpha = 2;
  cfg.fill_value = 0.3;
  cfg.scale = 100;
  const auto m = extract_feature_matrix(d, cfg);
  CHECK(m.at(0, 7) == doctest::Approx(30.0));
  CHECK(m.at(0, 8) == doctest::Approx(30.0));
  CHECK(m.at(1, 7) == doctest::Approx(50.0));
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.filled_cells == 2);

  cfg.scale = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.scale = 1;
  cfg.fill_value = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("indexed extractor equals the pairwise scan") {
  const auto d = oracle::random_dataset(300, 6, 11);
  for (const auto mode : {CoherenceMode::kDaily, CoherenceMode::kWeekly}) {
    for (const bool wrap : {false, true}) {
      ExtractionConfig cfg;
      cfg.alpha = 6;
      cfg.mode = mode;
      cfg.wrap_hours = wrap;
      cfg.scale = 1.0;
      const auto m = extract_feature_matrix(d, cfg);
      for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t z = 1; z <= 6; ++z) {
          CHECK(m.at(i, 6 + z) == oracle::coherence_value(d, i, z, mode, wrap, 0.0));
        }
      }
    }
  }
}

TEST_CASE("coherence sets are nested as the radius grows") {
  const auto d = oracle::random_dataset(400, 5, 3);
  const CoherenceIndex index(d, CoherenceMode::kDaily, false);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto sets = index.nested_sets(i, 23);
    for (std::size_t z = 1; z < sets.size(); ++z) {
      CHECK(std::includes(sets[z].members.begin(), sets[z].members.end(), sets[z - 1].members.begin(),
                          sets[z - 1].members.end()));
    }
    CHECK(sets.back().members.size() + 1 == d.positions_of(d[i].user_id).size());
  }
}

TEST_CASE("shifting a user's coordinates leaves their coherence unchanged") {
  // Offsets that are exact in binary keep the comparison exact.
  const auto d = oracle::random_dataset(200, 4, 21);
  std::vector<GpsSample> shifted = d.samples();
  for (auto& s : shifted) {
    if (s.user_id == "u1") {
      s.latitude += 0.5;
      s.longitude -= 0.25;
    }
  }
  ExtractionConfig cfg;
  cfg.alpha = 6;
  cfg.scale = 1;
  const auto a = extract_feature_matrix(d, cfg);
  const auto b = extract_feature_matrix(Dataset(shifted), cfg);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t c = 7; c < 13; ++c) CHECK(a.at(i, c) == doctest::Approx(b.at(i, c)).epsilon(1e-9));
  }
}

TEST_CASE("permuting rows permutes the matrix") {
  const auto d = oracle::random_dataset(250, 5, 8);
  std::vector<std::size_t> perm(d.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  std::vector<GpsSample> samples;
  for (const auto p : perm) samples.push_back(d[p]);
  const Dataset permuted(samples);

  ExtractionConfig cfg;
  cfg.alpha = 4;
  const auto a = extract_feature_matrix(d, cfg);
  const auto b = extract_feature_matrix(permuted, cfg);
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      CHECK(b.at(r, c) == doctest::Approx(a.at(perm[r], c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("coherence values are never negative") {
  const auto d = oracle::random_dataset(300, 7, 1);
  ExtractionConfig cfg;
  cfg.alpha = 6;
  const auto m = extract_feature_matrix(d, cfg);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 7; c < 13; ++c) CHECK(m.at(r, c) >= 0.0);
  }
}

TEST_CASE("thread count does not change the matrix") {
  const auto d = oracle::random_dataset(600, 9, 2);
  ExtractionConfig cfg;
  cfg.alpha = 6;
  cfg.threads = 1;
  const auto a = extract_feature_matrix(d, cfg);
  cfg.threads = 4;
  const auto b = extract_feature_matrix(d, cfg);
  std::ostringstream sa, sb;
  write_feature_csv(sa, a);
  write_feature_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("degenerate synthetic noise puts same-anchor hours at zero") {
  SynthConfig cfg;
  cfg.n_users = 3;
  cfg.samples_per_user = 120;
  cfg.anchors_per_user = 1;
  cfg.noise_sigma_deg = 1e-12;
  const auto d = generate_dataset(cfg);
  ExtractionConfig ext;
  ext.alpha = 6;
  const auto m = extract_feature_matrix(d, ext);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 7; c < 13; ++c) CHECK(m.at(r, c) == 0.0);
  }
}

TEST_CASE("leading columns") {
  ExtractionConfig cfg;
  cfg.alpha = 6;
  const auto m = extract_feature_matrix(oracle::worked_example_dataset(), cfg);
  const auto n = m.leading_columns(9);
  CHECK(n.cols() == 9);
  CHECK(n.column_names().back() == "dc_2");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < 9; ++c) CHECK(n.at(r, c) == m.at(r, c));
  }
}

TEST_CASE("feature csv layout") {
  ExtractionConfig cfg;
  cfg.alpha = 1;
  std::ostringstream out;
  write_feature_csv(out, extract_feature_matrix(oracle::worked_example_dataset(), cfg));
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "user_id,lat,lon,month,day,hour,minute,weekday,dc_1");
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("user1,35.65,139.7,1,16,10,55,4,141.42", 0) == 0);
}
