#include <doctest.h>

#include <cmath>

#include "geocoherence/error.hpp"
#include "geocoherence/threat.hpp"

using namespace geocoherence;

namespace {

ThreatParams params(double forge, std::uint64_t tries, std::uint64_t symbols, std::uint64_t digits) {
  ThreatParams p;
  p.pr_forge = forge;
  p.tries = tries;
  p.symbols = symbols;
  p.digits = digits;
  return p;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); }

}  // namespace

TEST_CASE("six-digit PIN examples") {
  CHECK(close(adversary_probability(params(1e-4, 4, 10, 6)), 4e-10));
  CHECK(close(adversary_probability(params(1e-4, 6, 10, 6)), 6e-10));
  CHECK(adversary_probability(params(1e-4, 0, 10, 6)) == 0.0);
  CHECK(adversary_probability(ThreatParams{}) == doctest::Approx(4e-10).epsilon(1e-12));
}

TEST_CASE("known PIN leaves only the classifier") {
  CHECK(post_compromise_probability(params(1e-4, 4, 10, 6)) == 1e-4);
  CHECK(format_percent(post_compromise_probability(params(1e-4, 4, 10, 6))) == "0.01%");
  CHECK(post_compromise_probability(params(0, 4, 10, 6)) == 0.0);
  CHECK(post_compromise_probability(params(1, 4, 10, 6)) == 1.0);
}

TEST_CASE("formatting") {
  CHECK(format_scientific(4e-10) == "4.000000e-10");
  CHECK(format_percent(4e-10) == "4e-08%");
  CHECK(format_percent(1.0) == "100%");
}

TEST_CASE("monotone in each argument") {
  double previous = -1.0;
  for (std::uint64_t tries = 0; tries <= 20; ++tries) {
    const double p = adversary_probability(params(1e-3, tries, 10, 4));
    CHECK(p >= previous);
    previous = p;
  }
  previous = -1.0;
  for (double forge = 0.0; forge <= 1.0; forge += 0.05) {
    const double p = adversary_probability(params(forge, 3, 10, 4));
    CHECK(p >= previous);
    previous = p;
  }
  previous = 2.0;
  for (std::uint64_t digits = 1; digits <= 12; ++digits) {
    const double p = adversary_probability(params(0.5, 3, 10, digits));
    CHECK(p <= previous);
    previous = p;
  }
  previous = 2.0;
  for (std::uint64_t symbols = 2; symbols <= 40; ++symbols) {
    const double p = adversary_probability(params(0.5, 3, symbols, 3));
    CHECK(p <= previous);
    previous = p;
  }
}

TEST_CASE("bounded by the known-PIN case and by one") {
  for (std::uint64_t tries : {1ULL, 5ULL, 100ULL}) {
    for (double forge : {0.0, 0.3, 1.0}) {
      const auto p = params(forge, tries, 10, 3);
      const double a = adversary_probability(p);
      CHECK(a <= post_compromise_probability(p));
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }
  CHECK(adversary_probability(params(1.0, 1000, 10, 3)) == 1.0);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(adversary_probability(params(1.5, 4, 10, 6)), ConfigError);
  CHECK_THROWS_AS(adversary_probability(params(-0.1, 4, 10, 6)), ConfigError);
  CHECK_THROWS_AS(adversary_probability(params(0.1, 4, 0, 6)), ConfigError);
  CHECK_THROWS_AS(adversary_probability(params(0.1, 4, 10, 0)), ConfigError);
  CHECK_THROWS_AS(adversary_probability(params(0.1, 1001, 10, 3)), ConfigError);
  CHECK(pin_space(10, 19) == 10'000'000'000'000'000'000ULL);
  CHECK_THROWS_AS(pin_space(10, 20), OverflowError);
  CHECK(pin_space(2, 63) == (1ULL << 63));
  CHECK_THROWS_AS(pin_space(2, 64), OverflowError);
}
