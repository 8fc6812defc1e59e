#include "geocoherence/threat.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "geocoherence/error.hpp"

namespace geocoherence {

std::uint64_t pin_space(std::uint64_t symbols, std::uint64_t digits) {
  std::uint64_t space = 1;
  for (std::uint64_t d = 0; d < digits; ++d) {
    if (symbols != 0 && space > std::numeric_limits<std::uint64_t>::max() / symbols) {
      throw OverflowError("symbols^digits exceeds the 64-bit range");
    }
    space *= symbols;
  }
  return space;
}

void ThreatParams::validate() const {
  if (!(pr_forge >= 0.0 && pr_forge <= 1.0)) throw ConfigError("forge probability must be in [0, 1]");
  if (symbols < 1) throw ConfigError("symbols per digit must be >= 1");
  if (digits < 1) throw ConfigError("digit count must be >= 1");
  if (tries > pin_space(symbols, digits)) {
    throw ConfigError("more tries than possible PIN codes");
  }
}

double adversary_probability(const ThreatParams& params) {
  params.validate();
  const auto space = pin_space(params.symbols, params.digits);
  return params.pr_forge * (static_cast<double>(params.tries) / static_cast<double>(space));
}

double post_compromise_probability(const ThreatParams& params) {
  params.validate();
  return params.pr_forge;
}

std::string format_percent(double probability) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g%%", probability * 100.0);
  return buf;
}

std::string format_scientific(double probability) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", probability);
  return buf;
}

}  // namespace geocoherence
