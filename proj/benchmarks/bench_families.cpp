#include "olb/family_box.hpp"
#include "olb/family_lp.hpp"
#include "olb/optimizers.hpp"
#include "olb/perturbed.hpp"

#include <benchmark/benchmark.h>

using namespace olb;

namespace {

BitString random_bits(std::size_t n, Rng& rng) {
  std::vector<std::uint8_t> b(n);
  for (auto& v : b) v = rng.bit();
  return BitString(std::move(b));
}

box::Point random_point(std::size_t n, Rng& rng) {
  box::Point x;
  for (std::size_t i = 0; i < n; ++i)
    x.push_back(Dyadic(static_cast<std::int64_t>(rng.below(2049)) - 1024).scaled(-10));
  return x;
}

void BM_BoxEval(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto inst = box::BoxInstance::from_concatenated(random_bits(n * 4, rng), n, 4);
  const auto x = random_point(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(box::eval_box(inst, x));
}
BENCHMARK(BM_BoxEval)->Arg(2)->Arg(8);

void BM_BoxEmulatedQuery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const auto S = random_bits(n * 4, rng);
  const auto x = random_point(n, rng);
  for (auto _ : state) {
    const auto plan = box::plan_query(x, 4);
    benchmark::DoNotOptimize(box::box_emulate(plan, x, sgp::answer(S, plan.query)));
  }
}
BENCHMARK(BM_BoxEmulatedQuery)->Arg(2)->Arg(8);

void BM_LpEmulatedQuery(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  const double p = state.range(1) == 0 ? 2.0 : 1.0;
  const lp::WorkingBasis basis(p, M);
  Rng rng(3);
  const auto S = random_bits(M, rng);
  lp::Vec x(M);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0) / static_cast<double>(M);
  for (auto _ : state) {
    const auto q = lp::lp_sgp_query(basis, x);
    benchmark::DoNotOptimize(lp::lp_emulate(basis, x, sgp::answer(S, q)));
  }
}
BENCHMARK(BM_LpEmulatedQuery)->Args({255, 0})->Args({256, 1})->Args({4096, 1});

void BM_WorkingCoordinates(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  const lp::WorkingBasis basis(1.0, M);
  Rng rng(4);
  lp::Vec x(M);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0) / static_cast<double>(M);
  for (auto _ : state) benchmark::DoNotOptimize(basis.working_coordinates(x));
}
BENCHMARK(BM_WorkingCoordinates)->Arg(64)->Arg(4096);

void BM_PerturbedEval(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  const auto params = perturbed::PerturbedBoxParams::with_depth(1e-3, M);
  Rng rng(5);
  const auto delta = perturbed::random_levels(params, rng);
  const auto s = random_bits(M, rng);
  const double x = rng.uniform(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(perturbed::eval_perturbed_1d(s, delta, x, params));
}
BENCHMARK(BM_PerturbedEval)->Arg(4)->Arg(8);

void BM_TailoredBoxLearner(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  const auto inst = box::BoxInstance::from_concatenated(random_bits(n * 3, rng), n, 3);
  for (auto _ : state) {
    auto em = emulated_oracle(box::emulation(n, 3), sgp::oracle_for(inst.concatenated()));
    benchmark::DoNotOptimize(opt::tailored_box_learner(em.as_oracle(), n, 3).queries_used);
  }
}
BENCHMARK(BM_TailoredBoxLearner)->Arg(2)->Arg(8);

void BM_TailoredLpLearner(benchmark::State& state) {
  const lp::WorkingBasis basis(2.0, static_cast<std::size_t>(state.range(0)));
  Rng rng(7);
  const auto inst = lp::LpInstance::from_bits(basis, random_bits(basis.M, rng));
  for (auto _ : state) {
    auto em = emulated_oracle(lp::emulation(basis), sgp::oracle_for(inst.bits()));
    benchmark::DoNotOptimize(opt::tailored_lp_learner(em.as_oracle(), basis).queries_used);
  }
}
BENCHMARK(BM_TailoredLpLearner)->Arg(63)->Arg(255);

}  // namespace
