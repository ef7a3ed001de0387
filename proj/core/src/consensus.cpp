#include "xrgsim/consensus.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace xrg {
namespace {

// Sequence numbers the invalid-tx attack uses for its fabricated rewards;
// far above anything organic traffic allocates, so the fabrication is
// rejected for its permissions, not for a sequence collision.
constexpr std::uint64_t kAttackSeqBase = 1'000'000'000;

constexpr Amount kSelfMintAmount = 1000 * kUnitsPerXrg;

}  // namespace

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Controller: return "controller";
    case NodeRole::Verifier: return "verifier";
  }
  return "unknown";
}

Chain resolve_fork(std::span<const Chain> candidates) {
  const Chain* best = nullptr;
  for (const Chain& candidate : candidates) {
    if (candidate.empty() || !validate_chain(candidate).valid) continue;
    if (best == nullptr || candidate.blocks().size() > best->blocks().size() ||
        (candidate.blocks().size() == best->blocks().size() &&
         candidate.tip().hash < best->tip().hash)) {
      best = &candidate;
    }
  }
  if (best == nullptr) {
    throw NoValidCandidateError("fork resolution: no valid candidate chain");
  }
  return *best;
}

Network::Network(std::vector<ValidatorSpec> validators,
                 PermissionTable permissions,
                 LedgerConfig config,
                 std::vector<Transaction> genesis_txs)
    : permissions_(std::move(permissions)), config_(std::move(config)) {
  if (validators.empty()) {
    throw std::invalid_argument("network requires at least one validator");
  }

  // Genesis is trusted input: every allocation and stake must apply.
  LedgerState base(permissions_, config_);
  for (const Transaction& tx : genesis_txs) {
    const TxRejectReason verdict = base.apply(tx);
    if (verdict != TxRejectReason::None) {
      throw std::invalid_argument("genesis transaction rejected: " +
                                  std::string(to_string(verdict)));
    }
  }
  const Block genesis = make_genesis(std::move(genesis_txs), system_address());

  for (ValidatorSpec& spec : validators) {
    if (!permissions_.allowed(ActionKind::Vote, spec.id)) {
      throw std::invalid_argument("validator lacks vote permission: " +
                                  spec.id.value);
    }
    Node node;
    node.id = spec.id;
    node.role = spec.role;
    node.honest = spec.honest;
    node.attack = std::move(spec.attack);
    node.replica.push_back(genesis);
    node.state = base;
    if (!nodes_.emplace(node.id, std::move(node)).second) {
      throw std::invalid_argument("duplicate validator id: " + spec.id.value);
    }
  }

  for (const auto& [id, node] : nodes_) {
    if (permissions_.allowed(ActionKind::ProposeBlock, id)) {
      proposers_.push_back(id);
    }
  }
  if (proposers_.empty()) {
    throw std::invalid_argument("no validator is permitted to propose blocks");
  }
}

const Node& Network::node(const Address& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("unknown validator: " + id.value);
  return it->second;
}

Node& Network::node_mut(const Address& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("unknown validator: " + id.value);
  return it->second;
}

const Block& Network::genesis() const {
  return nodes_.begin()->second.replica.blocks().front();
}

const Node& Network::honest_node() const {
  for (const auto& [id, node] : nodes_) {
    if (node.honest) return node;
  }
  throw std::logic_error("network has no honest node");
}

TxRejectReason Network::submit_transaction(const Transaction& tx) {
  const Node& ref = honest_node();
  const TxRejectReason verdict = ref.state.admission_check(tx);
  if (verdict != TxRejectReason::None) return verdict;
  for (const Transaction& pending : ref.mempool) {
    if (pending.sender == tx.sender && pending.seq == tx.seq) {
      return TxRejectReason::DuplicateSeq;
    }
  }
  // Synchronous lossless gossip: accepted transactions reach every pool.
  for (auto& [id, node] : nodes_) node.mempool.push_back(tx);
  return TxRejectReason::None;
}

Block Network::assemble_block(Node& proposer, std::uint64_t round,
                              std::map<TxRejectReason, std::uint64_t>& rejections,
                              std::vector<Transaction>& included,
                              std::vector<Transaction>& dropped) {
  const bool attacking = !proposer.honest && proposer.attack.fires(round);

  if (attacking && proposer.attack.action == AttackAction::InvalidTx) {
    // No prefilter, plus a self-minted reward the sender has no right to.
    included = proposer.mempool;
    Transaction forged;
    forged.sender = proposer.id;
    forged.seq = kAttackSeqBase + round;
    forged.payload = RewardPayload{proposer.id, kSelfMintAmount};
    included.push_back(std::move(forged));
  } else {
    // Honest assembly: speculatively apply the pool in order and keep what
    // sticks, so an honest proposer never ships an inapplicable transaction.
    LedgerState scratch = proposer.state;
    for (const Transaction& tx : proposer.mempool) {
      const TxRejectReason verdict = scratch.apply(tx);
      if (verdict == TxRejectReason::None) {
        included.push_back(tx);
      } else {
        ++rejections[verdict];
        dropped.push_back(tx);
      }
    }
  }

  // Built by hand rather than via build_next_block: a proposer that already
  // appended a forged block has an invalid replica, yet keeps extending it.
  Block block;
  block.height = proposer.replica.tip_height() + 1;
  block.prev_hash = proposer.replica.tip_hash();
  block.timestamp = round;
  block.proposer = proposer.id;
  block.transactions = included;
  block.hash = compute_block_hash(block);
  if (attacking && proposer.attack.action == AttackAction::ForgeHash) {
    block.hash.bytes[31] ^= 0x01;  // otherwise-valid block, corrupted digest
  }
  return block;
}

bool Network::honest_vote(const Node& voter, const Block& block,
                          std::uint64_t round,
                          const Address& expected_proposer) const {
  const Block& tip = voter.replica.tip();
  if (block.height != tip.height + 1) return false;
  if (block.prev_hash != tip.hash) return false;
  if (block.timestamp != round) return false;
  if (block.proposer != expected_proposer) return false;
  if (!permissions_.allowed(ActionKind::ProposeBlock, block.proposer)) return false;
  if (compute_block_hash(block) != block.hash) return false;

  LedgerState scratch = voter.state;
  for (const Transaction& tx : block.transactions) {
    if (scratch.apply(tx) != TxRejectReason::None) return false;
  }
  return true;
}

ProposalOutcome Network::run_round(std::uint64_t round) {
  const Address proposer_id = proposers_[round % proposers_.size()];
  Node& proposer = node_mut(proposer_id);

  ProposalOutcome outcome;
  outcome.proposer = proposer_id;
  std::vector<Transaction> included;
  std::vector<Transaction> dropped;
  outcome.block = assemble_block(proposer, round, outcome.assembly_rejections,
                                 included, dropped);

  const Proposal proposal{round, proposer_id, outcome.block};

  // Votes are collected in node-id order so aggregation is deterministic.
  std::vector<VoteMsg> votes;
  votes.reserve(nodes_.size());
  for (const auto& [id, node] : nodes_) {
    const bool approve =
        node.honest ? honest_vote(node, proposal.block, round, proposer_id)
                    : true;  // vote-for-anything
    votes.push_back({round, id, approve});
    if (approve) {
      ++outcome.votes_for;
    } else {
      ++outcome.votes_against;
    }
  }

  outcome.finalized = outcome.votes_for * 2 > nodes_.size();
  if (!outcome.finalized) return outcome;  // replicas and pools untouched

  auto vote_of = [&](const Address& id) {
    for (const VoteMsg& v : votes) {
      if (v.voter == id) return v.approve;
    }
    return false;
  };

  for (auto& [id, node] : nodes_) {
    if (!vote_of(id)) continue;
    if (node.replica.tip().hash != outcome.block.prev_hash) continue;
    node.replica.push_back(outcome.block);
    for (const Transaction& tx : outcome.block.transactions) {
      node.state.apply(tx);  // inapplicable transactions simply do not land
    }
    // Everything the proposer looked at this round is settled business:
    // drop included transactions and the filtered-out ones alike, plus
    // anything the advanced state now refuses outright.
    auto consumed = [&](const Transaction& tx) {
      if (node.state.seq_used(tx.sender, tx.seq)) return true;
      if (node.state.admission_check(tx) != TxRejectReason::None) return true;
      for (const Transaction& gone : dropped) {
        if (gone.sender == tx.sender && gone.seq == tx.seq) return true;
      }
      return false;
    };
    auto& pool = node.mempool;
    pool.erase(std::remove_if(pool.begin(), pool.end(), consumed), pool.end());
    outcome.appended_by.push_back(id);
  }

  outcome.fork_event = !outcome.appended_by.empty() &&
                       outcome.appended_by.size() < nodes_.size();
  if (outcome.fork_event && first_fork_round_ == kNoFork) {
    first_fork_round_ = round;
  }
  return outcome;
}

void Network::sync_node(const Address& id, std::span<const Chain> candidates) {
  Node& target = node_mut(id);
  Chain winner = resolve_fork(candidates);

  LedgerState rebuilt(permissions_, config_);
  for (const Block& block : winner.blocks()) {
    for (const Transaction& tx : block.transactions) rebuilt.apply(tx);
  }
  target.replica = std::move(winner);
  target.state = std::move(rebuilt);
}

}  // namespace xrg
