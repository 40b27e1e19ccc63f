#include "olb/family_1d.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

using namespace olb;
using f1d::eval;

namespace {

Dyadic d(const char* text) { return Dyadic::parse(text); }
BitString bs(const char* text) { return BitString::parse(text); }

std::vector<BitString> strings_up_to(std::size_t depth) {
  std::vector<BitString> out;
  for (std::size_t l = 0; l <= depth; ++l)
    for (const auto& s : all_strings(l)) out.push_back(s);
  return out;
}

}  // namespace

TEST_SUITE("family_1d") {
  TEST_CASE("intervals") {
    CHECK(f1d::interval_of(bs("")) == f1d::Interval1D{d("-1"), d("1")});
    CHECK(f1d::interval_of(bs("0")) == f1d::Interval1D{d("-1/2"), d("0")});
    CHECK(f1d::interval_of(bs("11")) == f1d::Interval1D{d("1/4"), d("3/8")});
    for (const auto& s : strings_up_to(6)) {
      const auto [lo, hi] = testing::direct_interval(s);
      CHECK(f1d::interval_of(s) == f1d::Interval1D{lo, hi});
    }
    const auto I = f1d::interval_of(bs("0"));
    CHECK(I.point_at(d("-1")) == I.lo);
    CHECK(I.point_at(d("0")) == d("-1/4"));
    CHECK(I.point_at(d("1")) == I.hi);
  }

  TEST_CASE("breakpoints satisfy 7 b_k = 3 + 4·8^{-k}") {
    CHECK(f1d::breakpoint(0) == Dyadic(1));
    CHECK(f1d::breakpoint(1) == d("1/2"));
    CHECK(f1d::breakpoint(2) == d("7/16"));
    for (std::size_t k = 0; k <= 30; ++k) CHECK(testing::breakpoint_closed_form_holds(k, f1d::breakpoint(k)));
  }

  TEST_CASE("documented values") {
    CHECK(eval(bs("0"), d("-1/4")) == d("3/8"));
    CHECK(eval(bs("0"), d("1")) == d("1"));
    CHECK(eval(bs("11"), d("5/16")) == d("27/64"));
    CHECK(eval(bs(""), d("-3/4")) == d("3/4"));
    CHECK(f1d::subgradient_1d(bs("0"), d("-3/8")) == d("-1/2"));
    CHECK(f1d::subgradient_1d(bs("0"), d("-1/4")) == d("0"));
    CHECK(f1d::subgradient_1d(bs(""), d("-1/2")) == d("-1"));
    CHECK(f1d::query_string(d("5/16"), 2).str() == "11");
    CHECK(f1d::query_string(d("3/4"), 2).str() == "1");
    CHECK(f1d::query_string(d("0"), 1).str() == "0");
    CHECK(f1d::eps_minima(bs("0"), d("1/8")) == f1d::Interval1D{d("-1/2"), d("0")});
  }

  TEST_CASE("evaluation equals the maximum of the affine pieces") {
    // Exhaustive over strings of depth ≤ 5 on the grid 2^{-8}.
    for (const auto& s : strings_up_to(5))
      for (int k = -256; k <= 256; ++k) {
        const Dyadic x = Dyadic(k).scaled(-8);
        CHECK(eval(s, x) == testing::pieces_eval(s, x));
      }
    Rng rng(1);
    for (int t = 0; t < 2000; ++t) {
      const auto s = testing::random_string(rng.below(9), rng);
      const auto x = testing::random_dyadic(rng, d("-1"), d("1"), 30);
      CHECK(eval(s, x) == testing::pieces_eval(s, x));
    }
  }

  TEST_CASE("canonical form and minimum") {
    Rng rng(2);
    for (const auto& s : strings_up_to(6)) {
      const auto I = f1d::interval_of(s);
      for (int t = 0; t < 20; ++t) {
        const auto x = testing::random_dyadic(rng, I.lo, I.hi, 24);
        CHECK(eval(s, x) == f1d::canonical_form(s, x));
      }
      CHECK(eval(s, I.center()) == f1d::minimum_value(s.size()));
    }
    CHECK(f1d::minimum_value(2) == d("7/16") - d("1/64"));
  }

  TEST_CASE("subgradients are valid") {
    Rng rng(3);
    for (int t = 0; t < 3000; ++t) {
      const auto s = testing::random_string(rng.below(7), rng);
      const auto x = testing::random_dyadic(rng, d("-1"), d("1"), 16);
      const auto y = testing::random_dyadic(rng, d("-1"), d("1"), 16);
      const auto g = f1d::subgradient_1d(s, x);
      CHECK(eval(s, y) >= eval(s, x) + g * (y - x));
    }
  }

  TEST_CASE("query strings descend only through interiors") {
    Rng rng(4);
    for (int t = 0; t < 3000; ++t) {
      const std::size_t M = 1 + rng.below(5);
      const auto x = testing::random_dyadic(rng, d("-1"), d("1"), static_cast<int>(2 * M + 3));
      const auto q = f1d::query_string(x, M);
      REQUIRE(q.size() >= 1);
      REQUIRE(q.size() <= M);
      const auto s0 = q.prefix(q.size() - 1);
      CHECK((s0.empty() || f1d::interval_of(s0).interior_contains(x)));
      if (q.size() < M) {
        CHECK_FALSE(f1d::interval_of(s0.append(0)).interior_contains(x));
        CHECK_FALSE(f1d::interval_of(s0.append(1)).interior_contains(x));
      }
    }
  }

  TEST_CASE("emulated first-order answers equal the direct ones") {
    Rng rng(5);
    for (int t = 0; t < 5000; ++t) {
      const std::size_t M = 1 + rng.below(5);
      const auto S = testing::random_string(M, rng);
      const auto x = testing::random_dyadic(rng, d("-1"), d("1"), static_cast<int>(2 * M + 3));
      const auto q = f1d::sgp_query(x, M);
      const auto e = f1d::emulate_first_order(x, sgp::answer(S, q), q.guess);
      CHECK(e.answer == f1d::reference_oracle(S, x));
      CHECK(e.answer.value == eval(S, x));
    }
  }

  TEST_CASE("depth from accuracy and domain errors") {
    CHECK(f1d::Family1D::from_eps(d("2^-9")).M == 3);
    CHECK(f1d::Family1D::from_eps(d("2^-8")).M == 2);
    CHECK(f1d::Family1D::from_eps(d("2^-12")).M == 4);
    CHECK_THROWS_AS(f1d::Family1D::from_eps(d("1/2")), std::invalid_argument);
    CHECK_THROWS_AS(f1d::Family1D(0), std::invalid_argument);
    CHECK_THROWS_AS(f1d::Family1D(2).check(bs("011")), std::invalid_argument);
    CHECK_THROWS_AS(eval(bs("0"), d("5/4")), f1d::DomainError);
    CHECK_THROWS_AS(f1d::eps_minima(bs("01"), d("1/8")), std::invalid_argument);
  }

  TEST_CASE("ε-minima are exactly the open sublevel intervals") {
    for (const auto& s : strings_up_to(3)) {
      const std::size_t M = std::max<std::size_t>(s.size(), 1);
      const Dyadic eps = Dyadic::pow2(-3 * static_cast<std::int64_t>(M));
      const auto E = f1d::eps_minima(s, eps);
      const Dyadic target = f1d::minimum_value(s.size()) + eps;
      CHECK(eval(s, E.lo) == target);
      CHECK(eval(s, E.hi) == target);
      CHECK(eval(s, E.center()) < target);
      CHECK(eval(s, E.lo - Dyadic::pow2(-40)) > target);
    }
  }
}
