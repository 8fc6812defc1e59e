#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geocoherence {

// Naive local calendar time at minute precision (seconds kept for round trips).
struct Timestamp {
  int year = 1970;
  int month = 1;   // 1..12
  int day = 1;     // 1..31
  int hour = 0;    // 0..23
  int minute = 0;  // 0..59
  int second = 0;  // 0..59

  // ISO weekday, 1 = Monday .. 7 = Sunday.
  int weekday() const;
  // Minutes since 1970-01-01 00:00.
  std::int64_t minutes_since_epoch() const;
  static Timestamp from_minutes_since_epoch(std::int64_t minutes);
  // "YYYY-MM-DDTHH:MM:SS"
  std::string to_iso() const;

  auto operator<=>(const Timestamp&) const = default;
};

// Accepts "YYYY-MM-DDTHH:MM[:SS]" and "YYYY/MM/DD HH:MM[:SS]". Returns nullopt
// when the text is not one of those spellings or not a real calendar instant.
std::optional<Timestamp> parse_timestamp(std::string_view text);

struct GpsSample {
  std::string user_id;
  Timestamp timestamp;
  double latitude = 0.0;   // [-90, 90]
  double longitude = 0.0;  // [-180, 180]

  bool operator==(const GpsSample&) const = default;
};

bool valid_latitude(double lat);
bool valid_longitude(double lon);

// Ordered samples plus a per-user index. Immutable once built, so it can be
// shared read-only across threads.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<GpsSample> samples);

  const std::vector<GpsSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const GpsSample& operator[](std::size_t i) const { return samples_[i]; }

  // user_id -> ascending sample positions. Ordered by user_id.
  const std::map<std::string, std::vector<std::size_t>>& user_index() const { return index_; }
  std::size_t user_count() const { return index_.size(); }
  const std::vector<std::size_t>& positions_of(const std::string& user) const;

 private:
  std::vector<GpsSample> samples_;
  std::map<std::string, std::vector<std::size_t>> index_;
};

// ---------------------------------------------------------------------------
// Trace files

enum class TraceFormat { kCsv, kJsonl };

std::optional<TraceFormat> trace_format_from_name(std::string_view name);
// Picks jsonl for *.jsonl / *.ndjson paths, csv otherwise.
TraceFormat trace_format_for_path(std::string_view path);

struct ParseOptions {
  TraceFormat format = TraceFormat::kCsv;
  // Strict mode throws on the first bad row; lenient mode skips and counts it.
  bool strict = false;
};

struct RejectedRow {
  std::size_t line = 0;
  std::string field;
  std::string message;
};

struct ParseResult {
  Dataset dataset;
  std::vector<RejectedRow> rejected;
};

inline constexpr std::string_view kTraceCsvHeader = "user_id,timestamp,latitude,longitude";

// Throws ParseError for a missing/wrong CSV header regardless of mode, and for
// any bad row in strict mode.
ParseResult parse_trace(std::istream& in, const ParseOptions& options);
ParseResult parse_trace_file(const std::string& path, const ParseOptions& options);

void write_trace(std::ostream& out, const Dataset& dataset, TraceFormat format);

// ---------------------------------------------------------------------------
// Summary

struct BoundingBox {
  double min_latitude = 0.0;
  double max_latitude = 0.0;
  double min_longitude = 0.0;
  double max_longitude = 0.0;
};

struct DatasetSummary {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_user;
  std::optional<Timestamp> first;
  std::optional<Timestamp> last;
  std::optional<BoundingBox> bounds;
};

DatasetSummary dataset_summary(const Dataset& dataset);

// ---------------------------------------------------------------------------
// Synthetic habit traces

struct CalendarDate {
  int year = 2017;
  int month = 1;
  int day = 1;
  auto operator<=>(const CalendarDate&) const = default;
};

std::optional<CalendarDate> parse_date(std::string_view text);

struct SynthConfig {
  std::size_t n_users = 30;
  std::size_t samples_per_user = 500;
  std::size_t anchors_per_user = 4;
  // Side of the square region (degrees) that every user's anchors are drawn
  // from. Users share one region so their places can overlap.
  double anchor_spread_deg = 0.05;
  double noise_sigma_deg = 0.002;
  double center_latitude = 35.68;
  double center_longitude = 139.76;
  CalendarDate start{2017, 1, 11};
  CalendarDate end{2017, 4, 26};
  // Minutes between consecutive samples of one user; 0 spreads the samples
  // evenly over the whole date range.
  std::size_t stride_minutes = 0;
  std::uint64_t seed = 42;

  // Throws ConfigError.
  void validate() const;
};

// Applies "key=value" lines (blank lines and '#' comments ignored) on top of
// `base`. Unknown keys and bad values raise ConfigError.
SynthConfig parse_synth_config(std::istream& in, SynthConfig base = {});

Dataset generate_dataset(const SynthConfig& config);

double round_to_micro_degrees(double value);

}  // namespace geocoherence
