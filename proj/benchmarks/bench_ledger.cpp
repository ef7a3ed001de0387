#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "xrgsim/address.hpp"
#include "xrgsim/block.hpp"
#include "xrgsim/tx.hpp"

namespace {

using namespace xrg;

std::vector<Transaction> sample_transactions(std::size_t count, std::uint64_t round) {
  const Address alice = derive_address("alice");
  const Address bob = derive_address("bob");
  std::vector<Transaction> txs;
  txs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    txs.push_back({alice, round * 1000 + i,
                   TokenTransferPayload{bob, static_cast<Amount>(i + 1), 0}});
  }
  return txs;
}

Chain build_chain(std::uint64_t blocks, std::size_t txs_per_block) {
  const Address proposer = derive_address("validator-0");
  Chain chain(make_genesis({}, proposer));
  for (std::uint64_t r = 1; r <= blocks; ++r) {
    append_block(chain, sample_transactions(txs_per_block, r), proposer, r);
  }
  return chain;
}

void BM_AppendBlock(benchmark::State& state) {
  const std::size_t txs = static_cast<std::size_t>(state.range(0));
  const Address proposer = derive_address("validator-0");
  for (auto _ : state) {
    state.PauseTiming();
    Chain chain(make_genesis({}, proposer));
    auto batch = sample_transactions(txs, 1);
    state.ResumeTiming();
    append_block(chain, std::move(batch), proposer, 1);
    benchmark::DoNotOptimize(chain.tip_hash());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(txs));
}
BENCHMARK(BM_AppendBlock)->Arg(10)->Arg(100)->Arg(1000);

void BM_ValidateChain(benchmark::State& state) {
  const Chain chain = build_chain(static_cast<std::uint64_t>(state.range(0)), 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(validate_chain(chain));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ValidateChain)->Arg(10)->Arg(100)->Arg(500);

void BM_TamperScan(benchmark::State& state) {
  const Chain chain = build_chain(static_cast<std::uint64_t>(state.range(0)), 20);
  Mutation m;
  m.height = static_cast<std::uint64_t>(state.range(0)) / 2;
  m.field = BlockField::Timestamp;
  m.value = 9999;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tamper_scan(chain, m));
  }
}
BENCHMARK(BM_TamperScan)->Arg(20)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
