#include <array>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <span>

#include "geocoherence/data.hpp"
#include "geocoherence/error.hpp"
#include "geocoherence/random.hpp"

namespace geocoherence {

namespace {

std::int64_t day_start_minutes(const CalendarDate& d) {
  return Timestamp{d.year, d.month, d.day, 0, 0, 0}.minutes_since_epoch();
}

std::string user_label(std::size_t index, std::size_t count) {
  const int width = std::max(3, static_cast<int>(std::to_string(count).size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "user%0*zu", width, index + 1);
  return buf;
}

// hour -> anchor index. The day is cut into contiguous bands at random hours;
// each band is owned by one anchor.
std::array<std::size_t, 24> draw_schedule(std::size_t anchors, Rng& rng) {
  const std::size_t bands = std::min<std::size_t>(anchors, 24);
  std::vector<int> cut_candidates(23);
  std::iota(cut_candidates.begin(), cut_candidates.end(), 1);
  shuffle(std::span<int>(cut_candidates), rng);
  std::vector<int> cuts(cut_candidates.begin(), cut_candidates.begin() + (bands - 1));
  std::sort(cuts.begin(), cuts.end());

  std::vector<std::size_t> owner(anchors);
  std::iota(owner.begin(), owner.end(), 0);
  shuffle(std::span<std::size_t>(owner), rng);

  std::array<std::size_t, 24> schedule{};
  std::size_t band = 0;
  for (int h = 0; h < 24; ++h) {
    while (band < cuts.size() && cuts[band] <= h) ++band;
    schedule[h] = owner[band];
  }
  return schedule;
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ConfigError("bad value for '" + key + "': " + value);
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("bad value for '" + key + "': " + value);
  }
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw ConfigError("bad value for '" + key + "': " + value);
  }
}

}  // namespace

double round_to_micro_degrees(double value) { return std::round(value * 1e6) / 1e6; }

std::optional<CalendarDate> parse_date(std::string_view text) {
  // Reuse the timestamp grammar with a midnight suffix.
  std::string probe(text);
  if (probe.size() != 10) return std::nullopt;
  probe += probe[4] == '/' ? " 00:00" : "T00:00";
  const auto ts = parse_timestamp(probe);
  if (!ts) return std::nullopt;
  return CalendarDate{ts->year, ts->month, ts->day};
}

void SynthConfig::validate() const {
  if (n_users < 1) throw ConfigError("n_users must be >= 1");
  if (samples_per_user < 1) throw ConfigError("samples_per_user must be >= 1");
  if (anchors_per_user < 1) throw ConfigError("anchors_per_user must be >= 1");
  if (!(noise_sigma_deg > 0.0) || !std::isfinite(noise_sigma_deg)) {
    throw ConfigError("noise_sigma_deg must be > 0");
  }
  if (!(anchor_spread_deg >= 0.0) || !std::isfinite(anchor_spread_deg)) {
    throw ConfigError("anchor_spread_deg must be >= 0");
  }
  if (!valid_latitude(center_latitude) || !valid_longitude(center_longitude)) {
    throw ConfigError("center coordinate out of range");
  }
  for (const auto& d : {start, end}) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT00:00", d.year, d.month, d.day);
    if (!parse_timestamp(buf)) throw ConfigError(std::string("invalid date ") + buf);
  }
  if (end < start) throw ConfigError("start date is after end date");
  if (stride_minutes > 0) {
    const auto span = day_start_minutes(end) + 1440 - day_start_minutes(start);
    if (static_cast<double>(samples_per_user) * static_cast<double>(stride_minutes) >
        static_cast<double>(span)) {
      throw ConfigError("samples_per_user * stride_minutes does not fit in the date range");
    }
  }
}

SynthConfig parse_synth_config(std::istream& in, SynthConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key == "users" || key == "n_users") {
      base.n_users = parse_count(key, value);
    } else if (key == "samples" || key == "samples_per_user") {
      base.samples_per_user = parse_count(key, value);
    } else if (key == "anchors" || key == "anchors_per_user") {
      base.anchors_per_user = parse_count(key, value);
    } else if (key == "spread" || key == "anchor_spread_deg") {
      base.anchor_spread_deg = parse_number(key, value);
    } else if (key == "noise" || key == "noise_sigma_deg") {
      base.noise_sigma_deg = parse_number(key, value);
    } else if (key == "center_lat" || key == "center_latitude") {
      base.center_latitude = parse_number(key, value);
    } else if (key == "center_lon" || key == "center_longitude") {
      base.center_longitude = parse_number(key, value);
    } else if (key == "start" || key == "end") {
      const auto date = parse_date(value);
      if (!date) throw ConfigError("bad date for '" + key + "': " + value);
      (key == "start" ? base.start : base.end) = *date;
    } else if (key == "stride" || key == "stride_minutes") {
      base.stride_minutes = parse_count(key, value);
    } else if (key == "seed") {
      base.seed = parse_count(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  return base;
}

Dataset generate_dataset(const SynthConfig& config) {
  config.validate();

  const std::int64_t first_minute = day_start_minutes(config.start);
  const std::int64_t span = day_start_minutes(config.end) + 1440 - first_minute;
  const double stride = config.stride_minutes > 0
                            ? static_cast<double>(config.stride_minutes)
                            : static_cast<double>(span) / static_cast<double>(config.samples_per_user);

  std::vector<GpsSample> samples;
  samples.reserve(config.n_users * config.samples_per_user);

  for (std::size_t u = 0; u < config.n_users; ++u) {
    Rng rng(derive_seed(config.seed, u));
    const std::string user = user_label(u, config.n_users);

    std::vector<std::pair<double, double>> anchors(config.anchors_per_user);
    for (auto& [lat, lon] : anchors) {
      lat = config.center_latitude + (uniform_unit(rng) - 0.5) * config.anchor_spread_deg;
      lon = config.center_longitude + (uniform_unit(rng) - 0.5) * config.anchor_spread_deg;
    }
    const auto schedule = draw_schedule(config.anchors_per_user, rng);

    // Per-user phase so users do not report at identical minutes.
    const double phase = uniform_unit(rng);
    for (std::size_t k = 0; k < config.samples_per_user; ++k) {
      auto offset = static_cast<std::int64_t>(std::floor((static_cast<double>(k) + phase) * stride));
      offset = std::min(offset, span - 1);
      const auto ts = Timestamp::from_minutes_since_epoch(first_minute + offset);
      const auto& [anchor_lat, anchor_lon] = anchors[schedule[ts.hour]];
      const double lat = anchor_lat + config.noise_sigma_deg * standard_normal(rng);
      const double lon = anchor_lon + config.noise_sigma_deg * standard_normal(rng);
      samples.push_back(GpsSample{user, ts, round_to_micro_degrees(std::clamp(lat, -90.0, 90.0)),
                                  round_to_micro_degrees(std::clamp(lon, -180.0, 180.0))});
    }
  }
  return Dataset(std::move(samples));
}

}  // namespace geocoherence
