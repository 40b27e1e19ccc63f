#include "olb/optimizers.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <cmath>

using namespace olb;

TEST_SUITE("optimizers") {
  TEST_CASE("tailored box learner identifies with exactly nM queries") {
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
      const std::size_t n = 1 + rng.below(4);
      const std::size_t M = 1 + rng.below(4);
      const auto inst = box::BoxInstance::from_concatenated(testing::random_string(n * M, rng), n, M);
      auto em = emulated_oracle(box::emulation(n, M), sgp::oracle_for(inst.concatenated()));
      const auto res = opt::tailored_box_learner(em.as_oracle(), n, M);
      CHECK(res.queries_used == n * M);
      REQUIRE(res.identified.has_value());
      CHECK(*res.identified == inst.concatenated());
      box::Point x;
      for (double v : res.final_point) x.push_back(Dyadic::from_double(v));
      CHECK(box::eval_box(inst, x) == f1d::minimum_value(M));
    }
  }

  TEST_CASE("tailored L^p learner identifies the signs") {
    Rng rng(2);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const lp::WorkingBasis basis(p, lp::choose_M(p, 0.25));
      for (int t = 0; t < 30; ++t) {
        const auto inst = lp::LpInstance::from_bits(basis, testing::random_string(basis.M, rng));
        auto em = emulated_oracle(lp::emulation(basis), sgp::oracle_for(inst.bits()));
        const double target = lp::witness_value(basis) + 0.25;
        const auto res = opt::tailored_lp_learner(em.as_oracle(), basis,
                                                  [&](const std::vector<double>& x) { return lp::eval_lp(inst, x) < target; });
        REQUIRE(res.identified.has_value());
        CHECK(*res.identified == inst.bits());
        CHECK(res.success);
        CHECK(res.queries_used <= 2 * basis.M);
        CHECK(res.queries_used == em.inner_queries());
      }
    }
  }

  TEST_CASE("projected subgradient reaches an ε-minimum on a small box instance") {
    Rng rng(3);
    const auto inst = box::BoxInstance::from_concatenated(testing::random_string(2, rng), 2, 1);
    const Dyadic target = f1d::minimum_value(1) + Dyadic::pow2(-3);
    auto judge = [&](const std::vector<double>& x) {
      return box::eval_box(inst, {Dyadic::from_double(x[0]), Dyadic::from_double(x[1])}) < target;
    };
    opt::SubgradientOptions o;
    o.steps = 5000;
    const auto res = opt::projected_subgradient(opt::adapt_box(box::reference_oracle_for(inst)), opt::Domain::box(2), o, judge);
    CHECK(res.success);
    CHECK(res.queries_used <= 5000);
  }

  TEST_CASE("domains") {
    const auto ball = opt::Domain::lp_ball(4, 1.0);
    CHECK(ball.l2_radius() == doctest::Approx(0.5));
    const auto projected = ball.project({3.0, 0.0, 0.0, 0.0});
    CHECK(std::hypot(projected[0], projected[1]) <= 0.5 + 1e-12);
    CHECK(opt::Domain::lp_ball(4, 3.0).l2_radius() == doctest::Approx(1.0));
    const auto b = opt::Domain::box(2).project({2.0, -3.0});
    CHECK(b[0] == 1.0);
    CHECK(b[1] == -1.0);
    Rng rng(4);
    for (int t = 0; t < 100; ++t) {
      const auto x = opt::Domain::lp_ball(3, 1.5).sample(rng);
      CHECK(lp::lp_norm(x, 1.5) <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("random search respects its budget") {
    const lp::WorkingBasis basis(2.0, 3);
    const lp::LpInstance inst{basis, {1, 1, -1}};
    const auto res = opt::random_search(opt::adapt_lp(lp::reference_oracle_for(inst), basis), opt::Domain::lp_ball(3, 2.0),
                                        40, 9, [](const std::vector<double>&) { return false; });
    CHECK(res.queries_used == 40);
    CHECK_FALSE(res.success);
  }

  TEST_CASE("CSV rows") {
    CHECK(opt::csv_header() == "algo,family,n,M,p,eps,seed,queries_used,success,identified\n");
    opt::RunRow row{"tailored", "box", 2, 3, INFINITY, 0.001953125, 1, {}};
    row.result.queries_used = 6;
    row.result.success = true;
    row.result.identified = BitString::parse("010101");
    CHECK(opt::csv_row(row) == "tailored,box,2,3,inf,0.001953125,1,6,1,010101\n");
  }
}
