#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "xrgsim/address.hpp"
#include "xrgsim/market.hpp"
#include "xrgsim/orders.hpp"

namespace {

using namespace xrg;

struct Book {
  std::vector<Offer> offers;
  std::vector<Bid> bids;
};

Book random_book(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Book book;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Offer o;
    o.seller = derive_address("seller-" + std::to_string(i));
    o.quantity_wh = 100 + static_cast<WattHours>(rng() % 5000);
    o.unit_price = 1000 + static_cast<Price>(rng() % 200000);
    o.seq = seq++;
    book.offers.push_back(std::move(o));

    Bid b;
    b.buyer = derive_address("buyer-" + std::to_string(i));
    b.quantity_wh = 100 + static_cast<WattHours>(rng() % 5000);
    b.budget = static_cast<Amount>(rng() % 2000000);
    b.seq = seq++;
    book.bids.push_back(std::move(b));
  }
  return book;
}

void BM_DoubleAuction(benchmark::State& state) {
  const Book book = random_book(static_cast<std::size_t>(state.range(0)), 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        clear_double_auction(book.offers, book.bids, UseCase::PeerToPeer));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_DoubleAuction)->Arg(10)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Settle(benchmark::State& state) {
  const Book book = random_book(static_cast<std::size_t>(state.range(0)), 7);
  const ClearingResult cleared =
      clear_double_auction(book.offers, book.bids, UseCase::PeerToPeer);
  for (auto _ : state) {
    std::map<Address, std::uint64_t> next_seq;
    SeqAllocator seqs(next_seq);
    std::uint64_t next_fill_id = 1;
    benchmark::DoNotOptimize(settle(cleared, seqs, next_fill_id, kUnitsPerXrg / 100));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(cleared.fills.size()));
}
BENCHMARK(BM_Settle)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
