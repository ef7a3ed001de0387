#include "xrgsim/block.hpp"

#include <stdexcept>

namespace xrg {

Bytes encode_block_fields(const Block& block) {
  ByteWriter w;
  w.u64(block.height);
  w.hash(block.prev_hash);
  w.u64(block.timestamp);
  w.str(block.proposer.value);
  w.u32(static_cast<std::uint32_t>(block.transactions.size()));
  for (const Transaction& tx : block.transactions) {
    encode_transaction(w, tx);
  }
  return w.take();
}

Hash compute_block_hash(const Block& block) {
  Bytes encoded = encode_block_fields(block);
  return sha256(std::span<const std::uint8_t>(encoded.data(), encoded.size()));
}

Block make_genesis(std::vector<Transaction> transactions, const Address& proposer) {
  Block g;
  g.height = 0;
  g.prev_hash = Hash::zero();
  g.timestamp = 0;
  g.proposer = proposer;
  g.transactions = std::move(transactions);
  g.hash = compute_block_hash(g);
  return g;
}

Block build_next_block(const Chain& chain, std::vector<Transaction> transactions,
                       const Address& proposer, std::uint64_t round) {
  if (!validate_chain(chain).valid) {
    throw std::invalid_argument("build_next_block: existing chain is invalid");
  }
  Block b;
  b.height = chain.tip_height() + 1;
  b.prev_hash = chain.tip_hash();
  b.timestamp = round;
  b.proposer = proposer;
  b.transactions = std::move(transactions);
  b.hash = compute_block_hash(b);
  return b;
}

void append_block(Chain& chain, std::vector<Transaction> transactions, const Address& proposer,
                  std::uint64_t round) {
  chain.push_back(build_next_block(chain, std::move(transactions), proposer, round));
}

ChainValidity validate_chain(const Chain& chain) {
  const auto& blocks = chain.blocks();
  if (blocks.empty()) return ChainValidity{false, 0};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    const bool linked = i == 0 ? b.prev_hash == Hash::zero() : b.prev_hash == blocks[i - 1].hash;
    if (b.height != i || !linked || b.hash != compute_block_hash(b)) {
      return ChainValidity{false, static_cast<std::uint64_t>(i)};
    }
  }
  return ChainValidity{};
}

namespace {

// Bumps the first quantity-like field of a transaction payload.
struct AmountMutator {
  std::uint64_t value;

  void operator()(DataPostPayload& p) const {
    std::visit([this](auto& order) { mutate_order(order); }, p.order);
  }
  void operator()(TradeSettlementPayload& p) const { p.quantity = static_cast<std::int64_t>(value); }
  void operator()(TokenTransferPayload& p) const { p.amount = static_cast<Amount>(value); }
  void operator()(TokenApprovePayload& p) const { p.amount = static_cast<Amount>(value); }
  void operator()(StakePayload& p) const { p.amount = static_cast<Amount>(value); }
  void operator()(UnstakePayload& p) const { p.amount = static_cast<Amount>(value); }
  void operator()(RewardPayload& p) const { p.amount = static_cast<Amount>(value); }

 private:
  void mutate_order(Offer& o) const { o.quantity_wh = static_cast<WattHours>(value); }
  void mutate_order(Bid& b) const { b.quantity_wh = static_cast<WattHours>(value); }
  void mutate_order(AncillaryOffer& o) const { o.capacity_w = static_cast<Watts>(value); }
  void mutate_order(AncillaryRequirement& r) const { r.capacity_w = static_cast<Watts>(value); }
  void mutate_order(EvseOffer& o) const { o.max_power_w = static_cast<Watts>(value); }
  void mutate_order(EvBid& b) const { b.demand_wh = static_cast<WattHours>(value); }
  void mutate_order(NetworkConstraint& c) const { c.capacity_w = static_cast<Watts>(value); }
};

}  // namespace

Chain apply_mutation(const Chain& chain, const Mutation& m) {
  if (chain.empty() || m.height > chain.tip_height()) {
    throw std::out_of_range("apply_mutation: height beyond chain tip");
  }
  Chain mutated = chain;
  Block& b = mutated.blocks_mutable()[m.height];
  switch (m.field) {
    case BlockField::Timestamp:
      b.timestamp = m.value;
      break;
    case BlockField::Proposer:
      b.proposer = Address(m.text);
      break;
    case BlockField::PrevHash: {
      // Deterministic corruption: flip the low bit of the last byte.
      b.prev_hash.bytes[31] ^= 0x01;
      break;
    }
    case BlockField::TxAmount:
      if (b.transactions.empty()) {
        throw std::invalid_argument("apply_mutation: block has no transactions to mutate");
      }
      std::visit(AmountMutator{m.value}, b.transactions.front().payload);
      break;
  }
  if (m.rehash) {
    b.hash = compute_block_hash(b);
  }
  return mutated;
}

std::vector<std::uint64_t> tamper_scan(const Chain& chain, const Mutation& m) {
  Chain mutated = apply_mutation(chain, m);
  ChainValidity verdict = validate_chain(mutated);
  std::vector<std::uint64_t> invalidated;
  if (!verdict.valid) {
    for (std::uint64_t h = verdict.first_bad_height; h <= mutated.tip_height(); ++h) {
      invalidated.push_back(h);
    }
  }
  return invalidated;
}

}  // namespace xrg
