#pragma once

#include "xrgsim/codec.hpp"
#include "xrgsim/hash.hpp"
#include "xrgsim/tx.hpp"

#include <cstdint>
#include <vector>

namespace xrg {

struct Block {
  std::uint64_t height = 0;
  Hash prev_hash;
  std::uint64_t timestamp = 0;  // simulation round, not wall clock
  Address proposer;
  std::vector<Transaction> transactions;
  Hash hash;  // SHA-256 of the canonical encoding of the fields above

  bool operator==(const Block&) const = default;
};

/// Canonical encoding of everything the block hash commits to.
Bytes encode_block_fields(const Block& block);
Hash compute_block_hash(const Block& block);

struct ChainValidity {
  bool valid = true;
  std::uint64_t first_bad_height = 0;

  bool operator==(const ChainValidity&) const = default;
};

/// Hash-linked block list. Construct via make_genesis + append_block;
/// an imported chain must pass validate_chain before use.
class Chain {
 public:
  Chain() = default;
  explicit Chain(Block genesis) { blocks_.push_back(std::move(genesis)); }

  const std::vector<Block>& blocks() const { return blocks_; }
  std::vector<Block>& blocks_mutable() { return blocks_; }
  bool empty() const { return blocks_.empty(); }
  std::uint64_t tip_height() const { return blocks_.back().height; }
  const Block& tip() const { return blocks_.back(); }
  Hash tip_hash() const { return blocks_.back().hash; }

  void push_back(Block b) { blocks_.push_back(std::move(b)); }

  bool operator==(const Chain&) const = default;

 private:
  std::vector<Block> blocks_;
};

Block make_genesis(std::vector<Transaction> transactions, const Address& proposer);

/// Builds a block extending `chain`'s tip and hashes it. The transaction
/// list may be empty (empty rounds are valid). Throws std::invalid_argument
/// if the existing chain fails validate_chain.
Block build_next_block(const Chain& chain, std::vector<Transaction> transactions,
                       const Address& proposer, std::uint64_t round);

void append_block(Chain& chain, std::vector<Transaction> transactions, const Address& proposer,
                  std::uint64_t round);

/// Valid iff every stored hash matches its recomputation, every prev_hash
/// link holds, heights run 0..tip consecutively, and genesis links to the
/// all-zero hash. Reports the lowest offending height otherwise.
ChainValidity validate_chain(const Chain& chain);

enum class BlockField : std::uint8_t {
  Timestamp,
  Proposer,
  PrevHash,
  TxAmount,  // first quantity-like field of the first transaction
};

/// Single-block mutation descriptor for tamper experiments.
struct Mutation {
  std::uint64_t height = 0;
  BlockField field = BlockField::Timestamp;
  std::uint64_t value = 0;     // new integer value where applicable
  std::string text;            // new text value for Proposer
  bool rehash = false;         // forge the mutated block's stored hash
};

Chain apply_mutation(const Chain& chain, const Mutation& m);

/// Heights a single-block mutation invalidates: the contiguous range from
/// the first failing height through the tip (empty if the chain still
/// validates). Throws std::out_of_range if the height exceeds the tip.
std::vector<std::uint64_t> tamper_scan(const Chain& chain, const Mutation& m);

}  // namespace xrg
