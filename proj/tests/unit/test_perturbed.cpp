#include "olb/family_1d.hpp"
#include "olb/perturbed.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <cmath>

using namespace olb;
using namespace olb::perturbed;

namespace {

PerturbedLpInstance lp_instance(double p, double eps, Rng& rng) {
  const lp::WorkingBasis basis(p, lp::choose_M(p, eps));
  const auto base = lp::LpInstance::from_bits(basis, testing::random_string(basis.M, rng));
  return random_perturbed_lp(base, eps, kDefaultK, rng);
}

}  // namespace

TEST_SUITE("perturbed") {
  TEST_CASE("zero perturbation reduces to the base family") {
    Rng rng(1);
    auto inst = lp_instance(2.0, 0.25, rng);
    std::fill(inst.delta.begin(), inst.delta.end(), 0.0);
    for (int t = 0; t < 100; ++t) {
      lp::Vec x(inst.base.basis.M);
      for (auto& v : x) v = rng.uniform(-0.2, 0.2);
      CHECK(eval_perturbed_lp(inst, x) == lp::eval_lp(inst.base, x));
    }
  }

  TEST_CASE("two-coordinate formula") {
    const lp::WorkingBasis basis(2.0, 2);
    PerturbedLpInstance inst{lp::LpInstance{basis, {1, -1}}, {0.001, 0.002}, 0.5, kDefaultK, 0};
    const double a = 0.3, b = -0.1;
    CHECK(eval_perturbed_lp(inst, {a, b}) == doctest::Approx(std::max(a + 0.001, -(b + 0.002))));
  }

  TEST_CASE("random perturbations stay in range and break ties") {
    Rng rng(2);
    std::size_t singletons = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
      const auto inst = lp_instance(2.0, 0.25, rng);
      for (double d : inst.delta) {
        CHECK(d >= 0.0);
        CHECK(d <= inst.delta_bar());
      }
      const auto x = sample_lp_trajectory(inst.base.basis, 1, rng).front();
      const auto set = maximizer_set(inst, x);
      singletons += set.indices.size() == 1 ? 1 : 0;
      const auto ans = maximal_oracle_lp(inst, x);
      if (set.indices.size() == 1) {
        REQUIRE(std::holds_alternative<Descriptor>(ans));
        const auto desc = std::get<Descriptor>(ans);
        const auto derived = descriptor_from_answer(inst.base.basis, x, single_coordinate_lp(inst, x));
        CHECK(desc.j == derived.j);
        CHECK(desc.sign == derived.sign);
        CHECK(derived.delta == doctest::Approx(desc.delta).epsilon(1e-9).scale(1e-6));
      }
    }
    CHECK(singletons == static_cast<std::size_t>(trials));
  }

  TEST_CASE("degenerate controls") {
    const lp::WorkingBasis basis(2.0, 5);
    PerturbedLpInstance inst{lp::LpInstance{basis, {1, 1, -1, 1, -1}}, std::vector<double>(5, 0.0), 0.25, kDefaultK, 0};
    const auto ans = maximal_oracle_lp(inst, lp::Vec(5, 0.0));
    REQUIRE(std::holds_alternative<Degenerate>(ans));
    CHECK(std::get<Degenerate>(ans).maximizers.size() == 5);
    CHECK_FALSE(unpredictability_audit_lp({lp::Vec(5, 0.0)}, inst).pass);
    Rng rng(3);
    const auto random = lp_instance(2.0, 0.25, rng);
    CHECK(unpredictability_audit_lp({lp::Vec(random.base.basis.M, 0.0)}, random).pass);
  }

  TEST_CASE("parameters") {
    const auto p = PerturbedBoxParams::from_eps(1e-6);
    CHECK(p.alpha > std::exp(-1.0));
    CHECK(p.iterations < 10);
    CHECK(static_cast<double>(p.M) == std::floor(std::log(1e6) / (3.0 - std::log(p.alpha))));
    CHECK(p.alpha == doctest::Approx(1.0 - 8e-6 / (5.0 * 100.0 * static_cast<double>(p.M))));
    CHECK(p.delta_bar > 0.0);
    const auto q = PerturbedBoxParams::with_depth(1e-3, 3);
    CHECK(q.M == 3);
    CHECK_THROWS(PerturbedBoxParams::from_eps(0.0));
    Rng rng(4);
    for (double d : random_levels(q, rng)) {
      CHECK(d > 0.0);
      CHECK(d <= q.delta_bar);
    }
  }

  TEST_CASE("breakpoints") {
    const auto p = PerturbedBoxParams::with_depth(1e-3, 4);
    const Levels delta{1e-12, 2e-12, 3e-12, 4e-12};
    CHECK(perturbed_breakpoint(0, delta, p) == 1.0);
    CHECK(perturbed_breakpoint(1, delta, p) == doctest::Approx(1.0 - p.alpha / 2.0 - 1e-12).epsilon(1e-15));
    // Nearly unperturbed parameters approach the exact family's breakpoints.
    PerturbedBoxParams near = p;
    near.alpha = 1.0 - 1e-9;
    const Levels tiny(5, 1e-15);
    near.M = 5;
    for (std::size_t l = 0; l <= 5; ++l)
      CHECK(perturbed_breakpoint(l, tiny, near) == doctest::Approx(f1d::breakpoint(l).to_double()).epsilon(1e-8));
  }

  TEST_CASE("binary64 evaluation tracks the exact construction") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
      const auto params = PerturbedBoxParams::with_depth(1e-3, 1 + rng.below(4));
      const auto delta = random_levels(params, rng);
      const auto s = testing::random_string(params.M, rng);
      const testing::ExactPerturbed exact(params, delta);
      for (int k = 0; k < 30; ++k) {
        const double x = rng.uniform(-1.0, 1.0);
        const Dyadic xd = Dyadic::from_double(x);
        CHECK(eval_perturbed_1d(s, delta, x, params) == doctest::Approx(exact.eval(s, xd).to_double()).epsilon(1e-12));
      }
      for (std::size_t l = 0; l <= params.M; ++l)
        CHECK(perturbed_breakpoint(l, delta, params) == doctest::Approx(exact.breakpoint(l).to_double()).epsilon(1e-14));
    }
  }

  TEST_CASE("canonical form holds exactly on I_s") {
    Rng rng(6);
    for (int t = 0; t < 100; ++t) {
      const auto params = PerturbedBoxParams::with_depth(1e-2, 1 + rng.below(4));
      const auto delta = random_levels(params, rng);
      const auto s = testing::random_string(params.M, rng);
      const testing::ExactPerturbed exact(params, delta);
      for (std::size_t l = 0; l <= s.size(); ++l) {
        const auto u = s.prefix(l);
        const auto [lo, hi] = testing::direct_interval(u);
        for (int k = 0; k < 10; ++k) {
          const auto x = testing::random_dyadic(rng, lo, hi, 30);
          CHECK(exact.eval(u, x) == exact.canonical(u, x));
          CHECK(perturbed_canonical_form(u, delta, x.to_double(), params) ==
                doctest::Approx(eval_perturbed_1d(u, delta, x.to_double(), params)).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("active intervals: the extension is strictly above inside, below at the ends") {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
      const auto params = PerturbedBoxParams::with_depth(1e-2, 1 + rng.below(4));
      const auto delta = random_levels(params, rng);
      const auto s = testing::random_string(params.M, rng);
      const testing::ExactPerturbed exact(params, delta);
      for (std::size_t l = 0; l < s.size(); ++l) {
        const auto u = s.prefix(l);
        const auto A = active_interval(u, s.bit(l + 1), delta, params);
        const auto I = interval_d(u);
        CHECK(A.lo > I.lo);
        CHECK(A.hi < I.hi);
        for (int k = 0; k < 10; ++k) {
          const Dyadic x = Dyadic::from_double(rng.uniform(A.lo, A.hi));
          if (!A.interior_contains(x.to_double())) continue;
          CHECK(exact.g(u, s.bit(l + 1), x) > exact.eval(u, x));
        }
        const auto [lo, hi] = testing::direct_interval(u);
        CHECK(exact.g(u, s.bit(l + 1), lo) < exact.eval(u, lo));
        CHECK(exact.g(u, s.bit(l + 1), hi) < exact.eval(u, hi));
      }
    }
  }

  TEST_CASE("box labels") {
    Rng rng(8);
    const auto params = PerturbedBoxParams::with_depth(1e-3, 3);
    auto one = random_perturbed_box(1, params, rng);
    for (int t = 0; t < 50; ++t) {
      const double x = rng.uniform(-1.0, 1.0);
      CHECK(eval_perturbed_box(one, {x}) == eval_perturbed_1d(one.strings[0], one.delta[0], x, params));
    }
    auto sym = random_perturbed_box(3, params, rng);
    sym.strings = {sym.strings[0], sym.strings[0], sym.strings[0]};
    sym.delta = {sym.delta[0], sym.delta[0], sym.delta[0]};
    const auto I = interval_d(sym.strings[0].prefix(1));
    const double c = (I.lo + I.hi) / 2.0;
    CHECK(maximizer_labels(sym, {c, c, c}).size() == 3);
    CHECK_FALSE(unpredictability_audit_box({{c, c, c}}, sym).pass);
    const auto fresh = random_perturbed_box(3, params, rng);
    CHECK(unpredictability_audit_box(sample_box_trajectory(fresh, 30, rng), fresh).pass);
    // At an outer corner the active set is missed and only bounds are learned.
    const auto outside = unpredictability_audit_box({{1.0, 1.0, 1.0}}, fresh);
    CHECK(outside.pass);
    CHECK(outside.outside_active == 1);
  }

  TEST_CASE("instance JSON round trips") {
    Rng rng(9);
    const auto box_inst = random_perturbed_box(2, PerturbedBoxParams::with_depth(1e-3, 2), rng);
    nlohmann::json j = box_inst;
    const auto back = j.get<PerturbedBoxInstance>();
    CHECK(back.strings == box_inst.strings);
    CHECK(back.delta == box_inst.delta);
    const auto lp_inst = lp_instance(1.5, 0.25, rng);
    nlohmann::json k = lp_inst;
    const auto lp_back = k.get<PerturbedLpInstance>();
    CHECK(lp_back.delta == lp_inst.delta);
    CHECK(lp_back.base.signs == lp_inst.base.signs);
  }
}

TEST_SUITE("perturbed") {
  TEST_CASE("the 1-extension mirrors the 0-extension about the origin") {
    Rng rng(10);
    for (int t = 0; t < 200; ++t) {
      const auto params = PerturbedBoxParams::with_depth(1e-2, 1 + rng.below(4));
      const auto delta = random_levels(params, rng);
      const auto s = testing::random_string(params.M, rng);
      std::vector<std::uint8_t> flipped;
      for (auto b : s.bits()) flipped.push_back(static_cast<std::uint8_t>(1 - b));
      const BitString mirror(flipped);
      const testing::ExactPerturbed exact(params, delta);
      for (int k = 0; k < 10; ++k) {
        const auto x = testing::random_dyadic(rng, Dyadic(-1), Dyadic(1), 30);
        CHECK(exact.eval(s, x) == exact.eval(mirror, -x));
        CHECK(eval_perturbed_1d(s, delta, x.to_double(), params) ==
              eval_perturbed_1d(mirror, delta, -x.to_double(), params));
      }
    }
  }
}
