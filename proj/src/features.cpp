#include "geocoherence/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <ostream>

#include "geocoherence/error.hpp"
#include "geocoherence/parallel.hpp"

namespace geocoherence {

namespace {

constexpr std::size_t kHours = 24;

}  // namespace

std::optional<CoherenceMode> coherence_mode_from_name(std::string_view name) {
  if (name == "daily") return CoherenceMode::kDaily;
  if (name == "weekly") return CoherenceMode::kWeekly;
  return std::nullopt;
}

std::string_view coherence_mode_name(CoherenceMode mode) {
  return mode == CoherenceMode::kDaily ? "daily" : "weekly";
}

void ExtractionConfig::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("scale must be > 0");
  if (!(fill_value >= 0.0) || !std::isfinite(fill_value)) {
    throw ConfigError("fill value must be a finite number >= 0");
  }
}

std::array<double, kBaseFeatureCount> extract_base_features(const GpsSample& s) {
  const auto& t = s.timestamp;
  return {s.latitude,
          s.longitude,
          static_cast<double>(t.month),
          static_cast<double>(t.day),
          static_cast<double>(t.hour),
          static_cast<double>(t.minute),
          static_cast<double>(t.weekday())};
}

int hour_distance(int a, int b, bool wrap) {
  const int d = a > b ? a - b : b - a;
  return wrap ? std::min(d, 24 - d) : d;
}

void assign_centroid(const Dataset& dataset, CoherenceSet& set) {
  if (set.members.empty()) {
    set.centroid_latitude = 0.0;
    set.centroid_longitude = 0.0;
    return;
  }
  const auto& first = dataset[set.members.front()];
  double lat_offset = 0.0;
  double lon_offset = 0.0;
  for (const auto j : set.members) {
    lat_offset += dataset[j].latitude - first.latitude;
    lon_offset += dataset[j].longitude - first.longitude;
  }
  const auto m = static_cast<double>(set.members.size());
  set.centroid_latitude = first.latitude + lat_offset / m;
  set.centroid_longitude = first.longitude + lon_offset / m;
}

CoherenceIndex::CoherenceIndex(const Dataset& dataset, CoherenceMode mode, bool wrap_hours)
    : dataset_(&dataset), mode_(mode), wrap_hours_(wrap_hours), user_of_(dataset.size()) {
  const std::size_t per_user = mode == CoherenceMode::kDaily ? kHours : 7 * kHours;
  buckets_.reserve(dataset.user_count());
  for (const auto& [user, positions] : dataset.user_index()) {
    auto& buckets = buckets_.emplace_back(per_user);
    for (const auto p : positions) {
      user_of_[p] = buckets_.size() - 1;
      buckets[bucket_of(p, dataset[p].timestamp.hour)].push_back(p);
    }
  }
}

std::size_t CoherenceIndex::bucket_of(std::size_t position, int hour) const {
  if (mode_ == CoherenceMode::kDaily) return static_cast<std::size_t>(hour);
  const int weekday = (*dataset_)[position].timestamp.weekday();
  return static_cast<std::size_t>(weekday - 1) * kHours + static_cast<std::size_t>(hour);
}

std::vector<CoherenceSet> CoherenceIndex::nested_sets(std::size_t i, std::size_t max_z) const {
  const auto& buckets = buckets_[user_of_[i]];
  const int hour = (*dataset_)[i].timestamp.hour;

  std::vector<std::size_t> current;
  for (const auto p : buckets[bucket_of(i, hour)]) {
    if (p != i) current.push_back(p);
  }
  std::array<bool, kHours> visited{};
  visited[static_cast<std::size_t>(hour)] = true;

  std::vector<CoherenceSet> sets;
  sets.reserve(max_z);
  std::vector<std::size_t> merged;
  for (std::size_t z = 1; z <= max_z; ++z) {
    for (const int sign : {-1, 1}) {
      int h = hour + sign * static_cast<int>(std::min<std::size_t>(z, kHours));
      if (wrap_hours_) {
        h = ((h % 24) + 24) % 24;
      } else if (h < 0 || h > 23) {
        continue;
      }
      if (visited[static_cast<std::size_t>(h)]) continue;
      visited[static_cast<std::size_t>(h)] = true;
      const auto& extra = buckets[bucket_of(i, h)];
      merged.clear();
      std::merge(current.begin(), current.end(), extra.begin(), extra.end(),
                 std::back_inserter(merged));
      current.swap(merged);
    }
    CoherenceSet set{current, 0.0, 0.0};
    assign_centroid(*dataset_, set);
    sets.push_back(std::move(set));
  }
  return sets;
}

CoherenceSet CoherenceIndex::coherence_set(std::size_t i, std::size_t z) const {
  if (z == 0) {
    CoherenceSet set;
    for (const auto p : buckets_[user_of_[i]][bucket_of(i, (*dataset_)[i].timestamp.hour)]) {
      if (p != i) set.members.push_back(p);
    }
    assign_centroid(*dataset_, set);
    return set;
  }
  auto sets = nested_sets(i, z);
  return std::move(sets.back());
}

CoherenceSet coherence_set(const Dataset& dataset, std::size_t i, std::size_t z, CoherenceMode mode,
                           bool wrap_hours) {
  return CoherenceIndex(dataset, mode, wrap_hours).coherence_set(i, z);
}

double distance_coherence(const GpsSample& sample, const CoherenceSet& set, double fill_value) {
  if (set.empty()) return fill_value;
  const double dlat = sample.latitude - set.centroid_latitude;
  const double dlon = sample.longitude - set.centroid_longitude;
  return std::sqrt(dlat * dlat + dlon * dlon);
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names, std::size_t rows)
    : names_(std::move(column_names)), rows_(rows), values_(rows * names_.size(), 0.0) {}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

FeatureMatrix FeatureMatrix::leading_columns(std::size_t count) const {
  count = std::min(count, cols());
  FeatureMatrix out(std::vector<std::string>(names_.begin(), names_.begin() + count), rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy_n(row(r).begin(), count, out.row(r).begin());
  }
  out.labels = labels;
  // The fill count is not tracked per column, so only a full copy keeps it.
  out.filled_cells = count == cols() ? filled_cells : 0;
  return out;
}

FeatureMatrix extract_feature_matrix(const Dataset& dataset, const ExtractionConfig& config) {
  config.validate();
  std::vector<std::string> names(kBaseFeatureNames.begin(), kBaseFeatureNames.end());
  for (std::size_t z = 1; z <= config.alpha; ++z) names.push_back("dc_" + std::to_string(z));

  FeatureMatrix matrix(std::move(names), dataset.size());
  matrix.labels.reserve(dataset.size());
  for (const auto& s : dataset.samples()) matrix.labels.push_back(s.user_id);

  std::optional<CoherenceIndex> index;
  if (config.alpha > 0) index.emplace(dataset, config.mode, config.wrap_hours);

  std::vector<std::size_t> filled(dataset.size(), 0);
  parallel_for(dataset.size(), config.threads, [&](std::size_t i) {
    const auto& sample = dataset[i];
    auto row = matrix.row(i);
    const auto base = extract_base_features(sample);
    std::copy(base.begin(), base.end(), row.begin());
    if (!index) return;
    const auto sets = index->nested_sets(i, config.alpha);
    for (std::size_t z = 0; z < config.alpha; ++z) {
      if (sets[z].empty()) ++filled[i];
      row[kBaseFeatureCount + z] =
          config.scale * distance_coherence(sample, sets[z], config.fill_value);
    }
  });
  for (const auto f : filled) matrix.filled_cells += f;
  return matrix;
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& matrix) {
  out << "user_id";
  for (const auto& name : matrix.column_names()) out << ',' << name;
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out << matrix.labels[r];
    for (const double v : matrix.row(r)) {
      std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

ColumnStats column_statistics(std::string name, std::span<const double> values) {
  ColumnStats stats;
  stats.name = std::move(name);
  stats.count = values.size();
  const std::size_t n = values.size();
  if (n == 0) return stats;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  stats.min = sorted.front();
  stats.max = sorted.back();
  stats.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;

  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  stats.mean = mean;
  if (n < 2) return stats;

  double m2 = 0.0;
  for (const double v : values) m2 += (v - mean) * (v - mean);
  const double nd = static_cast<double>(n);
  const double sd = std::sqrt(m2 / (nd - 1.0));
  stats.standard_deviation = sd;
  stats.standard_error = sd / std::sqrt(nd);
  if (sd == 0.0) return stats;

  double s3 = 0.0;
  double s4 = 0.0;
  for (const double v : values) {
    const double u = (v - mean) / sd;
    s3 += u * u * u;
    s4 += u * u * u * u;
  }
  if (n >= 3) stats.skewness = nd / ((nd - 1.0) * (nd - 2.0)) * s3;
  if (n >= 4) {
    stats.kurtosis = nd * (nd + 1.0) / ((nd - 1.0) * (nd - 2.0) * (nd - 3.0)) * s4 -
                     3.0 * (nd - 1.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
  }
  return stats;
}

std::vector<ColumnStats> feature_distribution(const FeatureMatrix& matrix) {
  std::vector<ColumnStats> out;
  out.reserve(matrix.cols());
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    const auto values = matrix.column(c);
    out.push_back(column_statistics(matrix.column_names()[c], values));
  }
  return out;
}

}  // namespace geocoherence
