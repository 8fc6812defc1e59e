#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geocoherence/data.hpp"
#include "geocoherence/matrix.hpp"

namespace geocoherence {

enum class CoherenceMode { kDaily, kWeekly };

std::optional<CoherenceMode> coherence_mode_from_name(std::string_view name);
std::string_view coherence_mode_name(CoherenceMode mode);

struct ExtractionConfig {
  std::size_t alpha = 0;
  CoherenceMode mode = CoherenceMode::kDaily;
  // Multiplier applied to the coherence columns after fill.
  double scale = 10000.0;
  // Coherence value used when the coherence set is empty. Must be >= 0.
  double fill_value = 0.0;
  // Measure hour distance around the clock (23 and 0 are 1 apart).
  bool wrap_hours = false;
  unsigned threads = 1;

  void validate() const;
};

inline constexpr std::size_t kBaseFeatureCount = 7;
inline constexpr std::array<const char*, kBaseFeatureCount> kBaseFeatureNames = {
    "lat", "lon", "month", "day", "hour", "minute", "weekday"};

// (lat, lon, month, day, hour, minute, weekday). The year is not a feature.
std::array<double, kBaseFeatureCount> extract_base_features(const GpsSample& sample);

// Hour distance used for window membership.
int hour_distance(int a, int b, bool wrap);

struct CoherenceSet {
  std::vector<std::size_t> members;  // ascending dataset positions
  double centroid_latitude = 0.0;    // meaningful only when !empty()
  double centroid_longitude = 0.0;

  bool empty() const { return members.empty(); }
};

// Mean of the members' coordinates. Sums run over members in ascending order as
// offsets from the first member, so identical coordinates give an exact centroid.
void assign_centroid(const Dataset& dataset, CoherenceSet& set);

// Per-user hour buckets (daily) or (weekday, hour) buckets (weekly), built once
// and then read-only.
class CoherenceIndex {
 public:
  CoherenceIndex(const Dataset& dataset, CoherenceMode mode, bool wrap_hours);

  // Members of the window of radius z around sample i (same user, j != i,
  // hour distance <= z, same weekday in weekly mode).
  CoherenceSet coherence_set(std::size_t i, std::size_t z) const;

  // Sets for radii 1..max_z in one pass; element z-1 holds radius z.
  std::vector<CoherenceSet> nested_sets(std::size_t i, std::size_t max_z) const;

  const Dataset& dataset() const { return *dataset_; }

 private:
  std::size_t bucket_of(std::size_t position, int hour) const;

  const Dataset* dataset_;
  CoherenceMode mode_;
  bool wrap_hours_;
  std::vector<std::size_t> user_of_;  // position -> user ordinal
  // user ordinal -> bucket -> ascending positions
  std::vector<std::vector<std::vector<std::size_t>>> buckets_;
};

// Convenience wrapper that builds an index for a single query.
CoherenceSet coherence_set(const Dataset& dataset, std::size_t i, std::size_t z, CoherenceMode mode,
                           bool wrap_hours = false);

// Euclidean distance in degrees from the sample to the set's centroid, or
// fill_value when the set is empty.
double distance_coherence(const GpsSample& sample, const CoherenceSet& set, double fill_value);

class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> column_names, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }

  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols(), cols()}; }
  std::vector<double> column(std::size_t c) const;
  MatrixView view() const { return MatrixView(values_, rows_, cols()); }

  // Same rows restricted to the first `count` columns.
  FeatureMatrix leading_columns(std::size_t count) const;

  std::vector<std::string> labels;  // user_id per row
  std::size_t filled_cells = 0;     // coherence cells that used the fill value

 private:
  std::vector<std::string> names_;
  std::size_t rows_ = 0;
  std::vector<double> values_;
};

FeatureMatrix extract_feature_matrix(const Dataset& dataset, const ExtractionConfig& config);

// Header "user_id,<columns>"; values with up to 9 significant digits.
void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix);

// Summary statistics of one column. Optional fields are absent when the column
// is too short (sd/se need 2 rows, skewness 3, kurtosis 4) or has zero spread.
struct ColumnStats {
  std::string name;
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> standard_error;
  std::optional<double> median;
  std::optional<double> standard_deviation;
  std::optional<double> kurtosis;  // excess, bias-corrected
  std::optional<double> skewness;  // bias-corrected
  std::optional<double> min;
  std::optional<double> max;
};

ColumnStats column_statistics(std::string name, std::span<const double> values);
std::vector<ColumnStats> feature_distribution(const FeatureMatrix& matrix);

}  // namespace geocoherence
