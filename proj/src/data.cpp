#include "geocoherence/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "geocoherence/error.hpp"

namespace geocoherence {

namespace {

namespace chr = std::chrono;

chr::sys_days to_sys_days(int year, int month, int day) {
  return chr::sys_days{chr::year{year} / chr::month{static_cast<unsigned>(month)} /
                       chr::day{static_cast<unsigned>(day)}};
}

bool valid_date(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  const chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                                chr::day{static_cast<unsigned>(day)}};
  return ymd.ok();
}

// Parses exactly `width` digits at `pos`.
bool read_fixed(std::string_view text, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_coordinate(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  // Avoid "-0.000000" so round trips stay byte-stable.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

struct RowFields {
  std::string user_id;
  std::string timestamp;
  std::optional<double> latitude;
  std::optional<double> longitude;
  std::string latitude_text;
  std::string longitude_text;
};

GpsSample validate_row(const RowFields& row, std::size_t line) {
  using Kind = ParseError::Kind;
  if (row.user_id.empty()) {
    throw ParseError(Kind::kMalformed, line, "user_id", "empty user_id");
  }
  const auto ts = parse_timestamp(row.timestamp);
  if (!ts) {
    throw ParseError(Kind::kTimestamp, line, "timestamp",
                     "unparseable timestamp '" + row.timestamp + "'");
  }
  if (!row.latitude) {
    throw ParseError(Kind::kMalformed, line, "latitude", "not a number: '" + row.latitude_text + "'");
  }
  if (!row.longitude) {
    throw ParseError(Kind::kMalformed, line, "longitude",
                     "not a number: '" + row.longitude_text + "'");
  }
  if (!valid_latitude(*row.latitude)) {
    throw ParseError(Kind::kRange, line, "latitude",
                     "latitude " + row.latitude_text + " outside [-90, 90]");
  }
  if (!valid_longitude(*row.longitude)) {
    throw ParseError(Kind::kRange, line, "longitude",
                     "longitude " + row.longitude_text + " outside [-180, 180]");
  }
  return GpsSample{row.user_id, *ts, *row.latitude, *row.longitude};
}

RowFields split_csv_row(std::string_view line, std::size_t line_no) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (fields.size() != 4) {
    throw ParseError(ParseError::Kind::kMalformed, line_no, "row",
                     "expected 4 fields, found " + std::to_string(fields.size()));
  }
  RowFields row;
  row.user_id = std::string(trim(fields[0]));
  row.timestamp = std::string(trim(fields[1]));
  row.latitude_text = std::string(trim(fields[2]));
  row.longitude_text = std::string(trim(fields[3]));
  row.latitude = parse_double(fields[2]);
  row.longitude = parse_double(fields[3]);
  return row;
}

RowFields split_jsonl_row(std::string_view line, std::size_t line_no) {
  using Kind = ParseError::Kind;
  const auto object = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (object.is_discarded() || !object.is_object()) {
    throw ParseError(Kind::kMalformed, line_no, "row", "not a JSON object");
  }
  RowFields row;
  auto string_field = [&](const char* key) {
    const auto it = object.find(key);
    if (it == object.end() || !it->is_string()) {
      throw ParseError(Kind::kMalformed, line_no, key, std::string("missing string key '") + key + "'");
    }
    return it->get<std::string>();
  };
  auto number_field = [&](const char* key, std::string& text) -> std::optional<double> {
    const auto it = object.find(key);
    if (it == object.end() || !it->is_number()) {
      throw ParseError(Kind::kMalformed, line_no, key, std::string("missing numeric key '") + key + "'");
    }
    const double v = it->get<double>();
    text = it->dump();
    return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
  };
  row.user_id = string_field("user_id");
  row.timestamp = string_field("timestamp");
  row.latitude = number_field("latitude", row.latitude_text);
  row.longitude = number_field("longitude", row.longitude_text);
  return row;
}

}  // namespace

ParseError::ParseError(Kind kind, std::size_t line, std::string field, const std::string& detail)
    : Error("line " + std::to_string(line) + ", field '" + field + "': " + detail),
      kind_(kind),
      line_(line),
      field_(std::move(field)) {}

int Timestamp::weekday() const {
  return static_cast<int>(chr::weekday{to_sys_days(year, month, day)}.iso_encoding());
}

std::int64_t Timestamp::minutes_since_epoch() const {
  const auto days = to_sys_days(year, month, day).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 1440 + hour * 60 + minute;
}

Timestamp Timestamp::from_minutes_since_epoch(std::int64_t minutes) {
  std::int64_t days = minutes / 1440;
  std::int64_t rem = minutes % 1440;
  if (rem < 0) {
    rem += 1440;
    --days;
  }
  const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  Timestamp ts;
  ts.year = static_cast<int>(ymd.year());
  ts.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  ts.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  ts.hour = static_cast<int>(rem / 60);
  ts.minute = static_cast<int>(rem % 60);
  return ts;
}

std::string Timestamp::to_iso() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", year, month, day, hour, minute,
                second);
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  // YYYY-MM-DDTHH:MM or YYYY/MM/DD HH:MM, optional :SS
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  const char date_sep = text[4];
  if (date_sep != '-' && date_sep != '/') return std::nullopt;
  if (text[7] != date_sep) return std::nullopt;
  const char time_sep = text[10];
  if (date_sep == '-' && time_sep != 'T') return std::nullopt;
  if (date_sep == '/' && time_sep != ' ') return std::nullopt;
  if (text[13] != ':') return std::nullopt;
  if (text.size() == 19 && text[16] != ':') return std::nullopt;

  Timestamp ts;
  if (!read_fixed(text, 0, 4, ts.year) || !read_fixed(text, 5, 2, ts.month) ||
      !read_fixed(text, 8, 2, ts.day) || !read_fixed(text, 11, 2, ts.hour) ||
      !read_fixed(text, 14, 2, ts.minute)) {
    return std::nullopt;
  }
  if (text.size() == 19 && !read_fixed(text, 17, 2, ts.second)) return std::nullopt;
  if (!valid_date(ts.year, ts.month, ts.day)) return std::nullopt;
  if (ts.hour > 23 || ts.minute > 59 || ts.second > 59) return std::nullopt;
  return ts;
}

bool valid_latitude(double lat) { return std::isfinite(lat) && lat >= -90.0 && lat <= 90.0; }
bool valid_longitude(double lon) { return std::isfinite(lon) && lon >= -180.0 && lon <= 180.0; }

Dataset::Dataset(std::vector<GpsSample> samples) : samples_(std::move(samples)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    index_[samples_[i].user_id].push_back(i);
  }
}

const std::vector<std::size_t>& Dataset::positions_of(const std::string& user) const {
  static const std::vector<std::size_t> kNone;
  const auto it = index_.find(user);
  return it == index_.end() ? kNone : it->second;
}

std::optional<TraceFormat> trace_format_from_name(std::string_view name) {
  if (name == "csv") return TraceFormat::kCsv;
  if (name == "jsonl" || name == "ndjson") return TraceFormat::kJsonl;
  return std::nullopt;
}

TraceFormat trace_format_for_path(std::string_view path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
  };
  return ends_with(".jsonl") || ends_with(".ndjson") ? TraceFormat::kJsonl : TraceFormat::kCsv;
}

ParseResult parse_trace(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  std::vector<GpsSample> samples;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = options.format == TraceFormat::kJsonl;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const std::string_view view = trim(line);
    if (!header_seen) {
      if (view != kTraceCsvHeader) {
        throw ParseError(ParseError::Kind::kMalformed, line_no, "header",
                         "expected header '" + std::string(kTraceCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (view.empty()) continue;
    try {
      const RowFields row = options.format == TraceFormat::kCsv ? split_csv_row(view, line_no)
                                                                : split_jsonl_row(view, line_no);
      samples.push_back(validate_row(row, line_no));
    } catch (const ParseError& e) {
      if (options.strict) throw;
      result.rejected.push_back({e.line(), e.field(), e.what()});
    }
  }
  if (!header_seen) {
    throw ParseError(ParseError::Kind::kMalformed, 1, "header", "empty input, header missing");
  }
  result.dataset = Dataset(std::move(samples));
  return result;
}

ParseResult parse_trace_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_trace(in, options);
}

void write_trace(std::ostream& out, const Dataset& dataset, TraceFormat format) {
  if (format == TraceFormat::kCsv) out << kTraceCsvHeader << '\n';
  for (const auto& s : dataset.samples()) {
    if (format == TraceFormat::kCsv) {
      out << s.user_id << ',' << s.timestamp.to_iso() << ',' << format_coordinate(s.latitude) << ','
          << format_coordinate(s.longitude) << '\n';
    } else {
      out << "{\"user_id\":" << nlohmann::json(s.user_id).dump() << ",\"timestamp\":\""
          << s.timestamp.to_iso() << "\",\"latitude\":" << format_coordinate(s.latitude)
          << ",\"longitude\":" << format_coordinate(s.longitude) << "}\n";
    }
  }
}

DatasetSummary dataset_summary(const Dataset& dataset) {
  DatasetSummary summary;
  summary.total = dataset.size();
  for (const auto& [user, positions] : dataset.user_index()) {
    summary.per_user[user] = positions.size();
  }
  for (const auto& s : dataset.samples()) {
    if (!summary.first || s.timestamp < *summary.first) summary.first = s.timestamp;
    if (!summary.last || *summary.last < s.timestamp) summary.last = s.timestamp;
    if (!summary.bounds) {
      summary.bounds = BoundingBox{s.latitude, s.latitude, s.longitude, s.longitude};
    } else {
      auto& b = *summary.bounds;
      b.min_latitude = std::min(b.min_latitude, s.latitude);
      b.max_latitude = std::max(b.max_latitude, s.latitude);
      b.min_longitude = std::min(b.min_longitude, s.longitude);
      b.max_longitude = std::max(b.max_longitude, s.longitude);
    }
  }
  return summary;
}

}  // namespace geocoherence
