#include <benchmark/benchmark.h>

#include "vouch/codec.hpp"
#include "vouch/keys.hpp"

namespace {

using namespace vouch;

void BM_DeriveServiceAddress(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(derive_service_address("http://foo.bar"));
}
BENCHMARK(BM_DeriveServiceAddress);

void BM_ValidateAddress(benchmark::State& state) {
  const std::string text = derive_service_address("http://foo.bar").text();
  for (auto _ : state) benchmark::DoNotOptimize(validate_address(text));
}
BENCHMARK(BM_ValidateAddress);

void BM_Sha256d(benchmark::State& state) {
  const Bytes data(static_cast<std::size_t>(state.range(0)), 0xab);
  for (auto _ : state) benchmark::DoNotOptimize(sha256d(data));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Sha256d)->Range(64, 64 << 10);

void BM_Sign(benchmark::State& state) {
  const KeyPair key = KeyPair::from_seed(seed_from_label("bench"));
  const Hash256 msg = sha256(as_bytes("message"));
  for (auto _ : state) benchmark::DoNotOptimize(key.sign(msg));
}
BENCHMARK(BM_Sign);

void BM_Verify(benchmark::State& state) {
  const KeyPair key = KeyPair::from_seed(seed_from_label("bench"));
  const Hash256 msg = sha256(as_bytes("message"));
  const Signature sig = key.sign(msg);
  for (auto _ : state) benchmark::DoNotOptimize(verify(sig, msg, key.public_key()));
}
BENCHMARK(BM_Verify);

}  // namespace

BENCHMARK_MAIN();
