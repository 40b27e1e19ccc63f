#include "olb/family_1d.hpp"
#include "olb/family_box.hpp"
#include "olb/oracle.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

using namespace olb;

TEST_SUITE("oracle_core") {
  TEST_CASE("recording oracles share their transcript across copies") {
    auto rec = wrap_with_transcript<int, int>([](const int& x) { return 2 * x; });
    auto copy = rec.as_oracle();
    CHECK(rec(3) == 6);
    CHECK(copy(4) == 8);
    CHECK(rec.queries() == 2);
    CHECK(rec.transcript().at(2).query == 4);
    CHECK(rec.transcript().at(2).t == 2);
    CHECK(rec.transcript().before(2).size() == 1);
  }

  TEST_CASE("composition of emulations") {
    const Emulation<int, int, int, int> add_one{[](const int& x) { return x + 1; },
                                                [](const int&, const int& r) { return r * 10; }};
    const Emulation<int, int, int, int> twice{[](const int& x) { return 2 * x; },
                                              [](const int& x, const int& r) { return r + x; }};
    const auto both = compose(add_one, twice);
    auto em = emulated_oracle(both, Oracle<int, int>([](const int& q) { return q * q; }));
    // query 3 → 4 → 8; inner answer 64 → twice: 64 + 4 = 68 → add_one: 680.
    CHECK(em(3) == 680);
    CHECK(em.outer_queries() == 1);
    CHECK(em.inner_queries() == 1);
    const auto id = compose(identity_emulation<int, int>(), add_one);
    auto em2 = emulated_oracle(id, Oracle<int, int>([](const int& q) { return q; }));
    CHECK(em2(5) == 60);
  }

  TEST_CASE("emulated oracle preserves query counts over a run") {
    Rng rng(1);
    const auto inst = box::BoxInstance::from_concatenated(testing::random_string(6, rng), 2, 3);
    auto em = emulated_oracle(box::emulation(2, 3), sgp::oracle_for(inst.concatenated()));
    for (int t = 1; t <= 50; ++t) {
      em({testing::random_dyadic(rng, Dyadic(-1), Dyadic(1), 8), testing::random_dyadic(rng, Dyadic(-1), Dyadic(1), 8)});
      CHECK(em.outer_queries() == static_cast<std::size_t>(t));
      CHECK(em.inner_queries() == static_cast<std::size_t>(t));
    }
    CHECK(em.outer_transcript().size() == em.inner_transcript().size());
  }

  TEST_CASE("locality holds for the first-order oracle and fails for a peeking one") {
    const std::size_t M = 3;
    const auto family = all_strings(M);
    const Dyadic step = Dyadic::pow2(-40);
    auto agree_near = [&](const BitString& a, const BitString& b, const Dyadic& x) {
      for (const auto& y : {x - step, x, x + step})
        if (abs(y) <= Dyadic(1) && f1d::eval(a, y) != f1d::eval(b, y)) return false;
      return true;
    };
    auto local = [](const BitString& S) {
      return Oracle<Dyadic, FirstOrderAnswer<Dyadic>>([S](const Dyadic& x) { return f1d::reference_oracle(S, x); });
    };
    auto peeking = [](const BitString& S) {
      return Oracle<Dyadic, FirstOrderAnswer<Dyadic>>([S](const Dyadic& x) {
        auto a = f1d::reference_oracle(S, x);
        a.axis = 1 + S.bit(S.size());  // leaks the last hidden bit
        return a;
      });
    };
    std::size_t compared = 0;
    bool caught = false;
    for (int k = -64; k <= 64; ++k) {
      const Dyadic x = Dyadic(k).scaled(-6);
      const auto good = locality_check<BitString, Dyadic, FirstOrderAnswer<Dyadic>>(local, family, x, agree_near);
      CHECK(good.pass);
      compared += good.pairs_compared;
      const auto bad = locality_check<BitString, Dyadic, FirstOrderAnswer<Dyadic>>(peeking, family, x, agree_near);
      caught = caught || !bad.pass;
    }
    CHECK(compared > 0);
    CHECK(caught);
  }
}
