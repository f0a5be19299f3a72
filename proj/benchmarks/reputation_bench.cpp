#include <benchmark/benchmark.h>

#include "vouch/reputation.hpp"
#include "vouch/sim.hpp"

namespace {

using namespace vouch;

Scenario market(std::uint64_t blocks) {
  Scenario s;
  s.seed = 3;
  s.blocks = blocks;
  s.miners = {"miner-a", "miner-b"};
  s.producers = {ProducerSpec{"p1", "http://one.example", Amount(10'000'000), 0.9, Amount::coins(1)},
                 ProducerSpec{"p2", "http://two.example", Amount(20'000'000), 0.6, Amount::coins(1)}};
  for (int i = 0; i < 8; ++i) {
    s.consumers.push_back(ConsumerSpec{"c" + std::to_string(i), Amount::coins(50), 0.7});
  }
  s.protocol.payment_fee = Amount(10'000);
  s.protocol.funding_fee = Amount(10'000);
  return s;
}

void BM_Simulate(benchmark::State& state) {
  const Scenario s = market(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run(s));
}
BENCHMARK(BM_Simulate)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FullRescan(benchmark::State& state) {
  const SimResult r = run(market(static_cast<std::uint64_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(full_rescan(r.chain, ScoringMode::weighted(Amount(300'000))));
  state.counters["events"] = static_cast<double>(r.index.events().size());
}
BENCHMARK(BM_FullRescan)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMicrosecond);

void BM_IncrementalIndex(benchmark::State& state) {
  const SimResult r = run(market(static_cast<std::uint64_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(index_chain(r.chain, ScoringMode::weighted(Amount(300'000))));
}
BENCHMARK(BM_IncrementalIndex)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
