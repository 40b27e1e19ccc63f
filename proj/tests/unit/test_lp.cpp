#include "olb/family_lp.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <cmath>

using namespace olb;

namespace {

lp::Vec random_ball_point(Rng& rng, std::size_t M, double p) {
  lp::Vec x(M);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  const double norm = lp::lp_norm(x, p);
  const double r = rng.uniform01();
  for (auto& v : x) v *= r / norm;
  return x;
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("working coordinates match an explicit matrix") {
    Rng rng(1);
    for (double p : {1.0, 1.5, 2.0, 3.0})
      for (std::size_t M : {1u, 2u, 4u, 8u, 16u, 64u}) {
        const lp::WorkingBasis basis(p, M);
        CHECK((basis.mode == lp::BasisMode::Tensor) == (p < 2.0));
        for (int t = 0; t < 10; ++t) {
          const auto x = random_ball_point(rng, M, p);
          const auto c = basis.working_coordinates(x);
          const auto ref = testing::dense_working_coordinates(basis, x);
          for (std::size_t i = 0; i < M; ++i) {
            CHECK(c[i] == doctest::Approx(ref[i]).epsilon(1e-12));
            CHECK(basis.working_coordinate(i + 1, x) == doctest::Approx(ref[i]).epsilon(1e-12));
          }
          const auto back = basis.from_working(c);
          for (std::size_t i = 0; i < M; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12).scale(1.0));
        }
      }
    CHECK_THROWS_AS(lp::WorkingBasis(1.5, 3), std::invalid_argument);
    CHECK_THROWS(lp::WorkingBasis(0.5, 4));
  }

  TEST_CASE("coordinate functionals have unit dual norm") {
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      const lp::WorkingBasis basis(p, 8);
      const double q = p == 1.0 ? INFINITY : p / (p - 1.0);
      for (std::size_t i = 1; i <= 8; ++i) {
        const auto g = basis.coordinate_gradient(i);
        double norm = 0.0;
        if (std::isinf(q)) {
          for (double v : g) norm = std::max(norm, std::abs(v));
        } else {
          for (double v : g) norm += std::pow(std::abs(v), q);
          norm = std::pow(norm, 1.0 / q);
        }
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("dimension choice") {
    CHECK(lp::choose_M(2.0, 1.0 / 16.0) == 255);
    CHECK(lp::choose_M(1.0, 0.1) == 64);
    CHECK(lp::choose_M(3.0, 0.25) == 63);
    CHECK(lp::choose_M(1.5, 0.25) == 8);
    CHECK(lp::choose_M(2.0, 0.25) == 15);
    CHECK_THROWS(lp::choose_M(2.0, 1.0));
  }

  TEST_CASE("packing witness and identification") {
    Rng rng(2);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double eps = 0.25;
      const lp::WorkingBasis basis(p, lp::choose_M(p, eps));
      const double r = basis.r();
      CHECK(lp::witness_value(basis) == doctest::Approx(-std::pow(static_cast<double>(basis.M), -1.0 / r)));
      for (int t = 0; t < 20; ++t) {
        const auto inst = lp::LpInstance::from_bits(basis, testing::random_string(basis.M, rng));
        const auto x = lp::packing_witness(inst);
        CHECK(lp::lp_norm(x, p) <= 1.0 + 1e-12);
        CHECK(lp::eval_lp(inst, x) == doctest::Approx(lp::witness_value(basis)).epsilon(1e-12));
        CHECK(lp::identify_from_eps_min(inst, x, eps) == inst.signs);
        // Another instance is strictly worse than ε away at this witness.
        auto other = inst;
        other.signs[rng.below(basis.M)] *= -1;
        CHECK(lp::eval_lp(other, x) >= lp::witness_value(basis) + eps);
      }
    }
  }

  TEST_CASE("value, domain and reference oracle") {
    const lp::WorkingBasis basis(2.0, 3);
    const lp::LpInstance inst{basis, {1, -1, 1}};
    CHECK(lp::eval_lp(inst, {0.1, 0.2, -0.3}) == doctest::Approx(0.1));
    const auto a = lp::reference_oracle(inst, {0.1, -0.5, 0.0});
    CHECK(a.axis == 2);
    CHECK(a.slope == -1.0);
    CHECK(a.value == doctest::Approx(0.5));
    CHECK_THROWS_AS(lp::eval_lp(inst, {1.0, 1.0, 0.0}), lp::DomainError);
    CHECK(inst.bits().str() == "101");
    nlohmann::json j = inst;
    const auto back = j.get<lp::LpInstance>();
    CHECK(back.signs == inst.signs);
    CHECK(back.basis.M == 3);
  }

  TEST_CASE("emulated answers equal the reference, ties included") {
    Rng rng(3);
    for (double p : {1.0, 1.5, 2.0, 3.0})
      for (int t = 0; t < 3000; ++t) {
        const std::size_t M = p < 2.0 ? std::size_t{1} << rng.below(5) : 1 + rng.below(12);
        const lp::WorkingBasis basis(p, M);
        const auto inst = lp::LpInstance::from_bits(basis, testing::random_string(M, rng));
        lp::Vec x;
        if (t % 2 == 0) {
          lp::Vec c(M);
          for (auto& v : c) v = 0.0625 * (static_cast<double>(rng.below(3)) - 1.0);
          x = basis.from_working(c);
          const double norm = lp::lp_norm(x, p);
          if (norm > 1.0)
            for (auto& v : x) v /= 2.0 * norm;
        } else {
          x = random_ball_point(rng, M, p);
        }
        const auto a = lp::lp_emulate(basis, x, sgp::answer(inst.bits(), lp::lp_sgp_query(basis, x)));
        const auto ref = lp::reference_oracle(inst, x);
        CHECK(a.axis == ref.axis);
        CHECK(a.slope == ref.slope);
        CHECK(a.value == doctest::Approx(ref.value).epsilon(1e-12));
      }
  }

  TEST_CASE("confidence order") {
    CHECK(lp::confidence_order({0.1, -0.3, 0.3, 0.0}) == std::vector<std::size_t>{2, 3, 1, 4});
  }
}
