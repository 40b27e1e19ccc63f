#include "olb/bitstr.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

using olb::BitString;

TEST_SUITE("bitstr") {
  TEST_CASE("parse and print round trip") {
    for (const char* s : {"", "0", "1", "0110", "1111000011"}) CHECK(BitString::parse(s).str() == s);
    CHECK_THROWS_AS(BitString::parse("01a"), std::invalid_argument);
    CHECK(BitString::zeros(3).str() == "000");
    CHECK(BitString::ones(2).str() == "11");
  }

  TEST_CASE("one-based access and bounds") {
    const auto s = BitString::parse("0110");
    CHECK(s.bit(1) == 0);
    CHECK(s.bit(2) == 1);
    CHECK_THROWS_AS(s.bit(0), std::out_of_range);
    CHECK_THROWS_AS(s.bit(5), std::out_of_range);
  }

  TEST_CASE("flip_cut, prefix, append") {
    const auto s = BitString::parse("0110");
    CHECK(s.flip_cut(1).str() == "1");
    CHECK(s.flip_cut(3).str() == "010");
    CHECK(s.flip_cut(4).str() == "0111");
    CHECK(s.prefix(0).str().empty());
    CHECK(s.prefix(2).str() == "01");
    CHECK(s.append(1).str() == "01101");
    CHECK(s.with_bit(1, 1).str() == "1110");
  }

  TEST_CASE("relation between strings") {
    using olb::Relation;
    const auto a = BitString::parse("01");
    const auto b = BitString::parse("0110");
    const auto c = BitString::parse("00");
    CHECK(olb::relate(a, b) == Relation::PrefixOfSecond);
    CHECK(olb::relate(b, a) == Relation::PrefixOfFirst);
    CHECK(olb::relate(a, a) == Relation::Equal);
    CHECK(olb::relate(a, c) == Relation::Parallel);
    CHECK(olb::relate(BitString{}, c) == Relation::PrefixOfSecond);
    CHECK(a.is_prefix_of(b));
    CHECK_FALSE(c.is_prefix_of(b));
  }

  TEST_CASE("enumeration is lexicographic") {
    const auto all = olb::all_strings(3);
    REQUIRE(all.size() == 8);
    for (std::size_t i = 0; i + 1 < all.size(); ++i) CHECK(all[i] < all[i + 1]);
    CHECK(all.front().str() == "000");
    CHECK(all.back().str() == "111");
    CHECK(olb::from_code(5, 3).str() == "101");
    CHECK(olb::from_code(1, 4).str() == "0001");
  }
}
