#include "olb/dyadic.hpp"
#include "olb/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

using olb::Dyadic;

TEST_SUITE("dyadic") {
  TEST_CASE("parsing accepted forms") {
    const Dyadic three_eighths = Dyadic::ratio(3, 3);
    CHECK(Dyadic::parse("3/8") == three_eighths);
    CHECK(Dyadic::parse("0.375") == three_eighths);
    CHECK(Dyadic::parse("3*2^-3") == three_eighths);
    CHECK(Dyadic::parse("-3/8") == -three_eighths);
    CHECK(Dyadic::parse("2^-9") == Dyadic::pow2(-9));
    CHECK(Dyadic::parse("5") == Dyadic(5));
    CHECK(Dyadic::parse("010/16") == Dyadic::ratio(5, 3));
    CHECK(Dyadic::parse("007.5") == Dyadic::ratio(15, 1));
    CHECK_THROWS_AS(Dyadic::parse("1/3"), std::invalid_argument);
    CHECK_THROWS_AS(Dyadic::parse("0.1"), std::invalid_argument);
    CHECK_THROWS_AS(Dyadic::parse("abc"), std::invalid_argument);
  }

  TEST_CASE("canonical representation makes equality structural") {
    CHECK(Dyadic(4) == Dyadic(Dyadic::Int(1), 2));
    CHECK(Dyadic(Dyadic::Int(6), -2) == Dyadic::ratio(3, 1));
    CHECK(Dyadic(0) == Dyadic(Dyadic::Int(0), 17));
    CHECK(Dyadic::ratio(3, 3).str() == "3*2^-3");
    CHECK(Dyadic::ratio(3, 3).decimal() == "0.375");
    CHECK(Dyadic::ratio(-1, 4).decimal() == "-0.0625");
  }

  TEST_CASE("arithmetic agrees with binary64 on small operands") {
    olb::Rng rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
      const auto a = static_cast<std::int64_t>(rng.below(2001)) - 1000;
      const auto b = static_cast<std::int64_t>(rng.below(2001)) - 1000;
      const unsigned ka = static_cast<unsigned>(rng.below(12));
      const unsigned kb = static_cast<unsigned>(rng.below(12));
      const Dyadic x = Dyadic::ratio(a, ka);
      const Dyadic y = Dyadic::ratio(b, kb);
      const double dx = static_cast<double>(a) / static_cast<double>(1u << ka);
      const double dy = static_cast<double>(b) / static_cast<double>(1u << kb);
      CHECK((x + y).to_double() == dx + dy);
      CHECK((x - y).to_double() == dx - dy);
      CHECK((x * y).to_double() == dx * dy);
      CHECK(((x < y) == (dx < dy)));
      CHECK(midpoint(x, y).to_double() == (dx + dy) / 2);
    }
  }

  TEST_CASE("binary64 values convert exactly") {
    for (double v : {0.1, -2.5, 1e-300, 123456789.125, 0.0}) CHECK(Dyadic::from_double(v).to_double() == v);
    CHECK(Dyadic::from_double(0.5) == Dyadic::pow2(-1));
    CHECK_THROWS(Dyadic::from_double(std::numeric_limits<double>::infinity()));
  }

  TEST_CASE("scaling by powers of two") {
    CHECK(Dyadic(3).scaled(-2) == Dyadic::ratio(3, 2));
    CHECK(Dyadic::ratio(3, 2).scaled(2) == Dyadic(3));
    CHECK(abs(Dyadic(-3)) == Dyadic(3));
    CHECK(min(Dyadic(1), Dyadic(2)) == Dyadic(1));
    CHECK(max(Dyadic(1), Dyadic(2)) == Dyadic(2));
  }
}
