#include "olb/sgp.hpp"

#include <benchmark/benchmark.h>

using namespace olb;

namespace {

BitString random_bits(std::size_t n, Rng& rng) {
  std::vector<std::uint8_t> b(n);
  for (auto& v : b) v = rng.bit();
  return BitString(std::move(b));
}

void BM_SgpAnswer(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto S = random_bits(M, rng);
  const auto q = sgp::next_query(sgp::Strategy::RandomGuess, sgp::Posterior(M), rng);
  for (auto _ : state) benchmark::DoNotOptimize(sgp::answer(S, q));
}
BENCHMARK(BM_SgpAnswer)->Arg(32)->Arg(1024);

void BM_StrategyRun(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const auto S = random_bits(M, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sgp::run_strategy(sgp::Strategy::GuessFull, S, rng).T);
}
BENCHMARK(BM_StrategyRun)->Arg(8)->Arg(32)->Arg(255);

void BM_KDistribution(benchmark::State& state) {
  const auto M = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const sgp::Posterior post(M);
  const auto q = sgp::next_query(sgp::Strategy::GuessFull, post, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sgp::k_distribution_enumerated(post, q).expectation());
}
BENCHMARK(BM_KDistribution)->Arg(8)->Arg(12);

}  // namespace
