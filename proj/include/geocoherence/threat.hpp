#pragma once

#include <cstdint>
#include <string>

namespace geocoherence {

// PIN-plus-behaviour attack model.
struct ThreatParams {
  double pr_forge = 1e-4;     // probability of fooling the classifier (its FNR)
  std::uint64_t tries = 4;    // PIN attempts before lock-out
  std::uint64_t symbols = 10; // candidates per PIN digit
  std::uint64_t digits = 6;   // PIN length

  // Throws ConfigError for out-of-range fields or tries > symbols^digits,
  // OverflowError when symbols^digits does not fit in 64 bits.
  void validate() const;
};

// symbols^digits, exact. Throws OverflowError past 2^64 - 1.
std::uint64_t pin_space(std::uint64_t symbols, std::uint64_t digits);

// pr_forge * tries / symbols^digits.
double adversary_probability(const ThreatParams& params);

// The PIN is already known (shoulder surfing, collusion): only the classifier stands.
double post_compromise_probability(const ThreatParams& params);

// "0.01%" style rendering of a probability.
std::string format_percent(double probability);
// "4.000000e-10" style rendering.
std::string format_scientific(double probability);

}  // namespace geocoherence
