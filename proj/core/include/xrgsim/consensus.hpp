#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "xrgsim/address.hpp"
#include "xrgsim/block.hpp"
#include "xrgsim/permissions.hpp"
#include "xrgsim/state.hpp"
#include "xrgsim/tx.hpp"

namespace xrg {

/// Controller nodes may propose blocks (and stand in for grid-asset
/// managers); verifier nodes only validate and vote.
enum class NodeRole : std::uint8_t { Controller = 1, Verifier = 2 };

std::string_view to_string(NodeRole role);

/// The bounded misbehavior menu for dishonest validators.  Firing rounds
/// matter only when the dishonest node is the proposer; dishonest nodes
/// always vote in favor of everything regardless.
enum class AttackAction : std::uint8_t { None = 0, ForgeHash, InvalidTx };

struct AttackPlan {
  AttackAction action = AttackAction::None;
  bool always = false;
  std::set<std::uint64_t> rounds;

  bool fires(std::uint64_t round) const {
    return action != AttackAction::None && (always || rounds.count(round) > 0);
  }
};

struct ValidatorSpec {
  Address id;
  NodeRole role = NodeRole::Verifier;
  bool honest = true;
  AttackPlan attack;
};

/// One validator: a full replica, the ledger state derived from it, and the
/// pending-transaction pool.
struct Node {
  Address id;
  NodeRole role = NodeRole::Verifier;
  bool honest = true;
  AttackPlan attack;
  Chain replica;
  LedgerState state;
  std::vector<Transaction> mempool;
};

// The wire shapes exchanged within a round.  The network is synchronous and
// lossless, so these are plain values handed around by the scheduler.
struct Proposal {
  std::uint64_t round = 0;
  Address proposer;
  Block block;
};

struct VoteMsg {
  std::uint64_t round = 0;
  Address voter;
  bool approve = false;
};

struct ChainSync {
  Address from;
  Chain chain;
};

struct ProposalOutcome {
  Block block;
  Address proposer;
  std::size_t votes_for = 0;
  std::size_t votes_against = 0;
  bool finalized = false;
  /// Replicas that actually appended the finalized block.
  std::vector<Address> appended_by;
  /// A finalized block that only a proper subset of replicas accepted: the
  /// network has forked.
  bool fork_event = false;
  /// Transactions the proposer dropped while assembling the block, by
  /// reason.  Populated only for honest (or honestly-behaving) proposers.
  std::map<TxRejectReason, std::uint64_t> assembly_rejections;
};

struct NoValidCandidateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Longest valid chain wins; ties break toward the lexicographically smaller
/// tip hash.  Candidates failing full validation are disqualified.  Throws
/// NoValidCandidateError when nothing valid remains.
Chain resolve_fork(std::span<const Chain> candidates);

/// The round-driven validator network.  All nodes share one genesis block
/// built from the given transactions (which must all apply cleanly).
class Network {
 public:
  Network(std::vector<ValidatorSpec> validators,
          PermissionTable permissions,
          LedgerConfig config,
          std::vector<Transaction> genesis_txs);

  /// Admission-check the transaction against the honest replicas' shared
  /// state and, if accepted, place it in every node's mempool.  Mirrors of
  /// an already-pending (sender, seq) pair are rejected as duplicates.
  TxRejectReason submit_transaction(const Transaction& tx);

  /// One consensus round: pick the proposer by rotation, assemble and gossip
  /// a block, collect votes in node-id order, and append on majority.  An
  /// unfinalized round leaves every replica and mempool untouched.
  ProposalOutcome run_round(std::uint64_t round);

  /// Replace a node's replica with the fork-resolution winner among the
  /// given candidates, rebuilding its ledger state from scratch.
  void sync_node(const Address& id, std::span<const Chain> candidates);

  const Node& node(const Address& id) const;
  const std::map<Address, Node>& nodes() const { return nodes_; }
  std::size_t validator_count() const { return nodes_.size(); }
  const std::vector<Address>& proposer_rotation() const { return proposers_; }
  const Block& genesis() const;

  /// Any honest node (they are interchangeable while no fork occurred).
  const Node& honest_node() const;

  /// First round in which a finalized block was not accepted by every
  /// replica, if that ever happened.
  bool forked() const { return first_fork_round_ != kNoFork; }
  std::uint64_t first_fork_round() const { return first_fork_round_; }

 private:
  static constexpr std::uint64_t kNoFork = ~std::uint64_t{0};

  Node& node_mut(const Address& id);
  Block assemble_block(Node& proposer, std::uint64_t round,
                       std::map<TxRejectReason, std::uint64_t>& rejections,
                       std::vector<Transaction>& included,
                       std::vector<Transaction>& dropped);
  bool honest_vote(const Node& voter, const Block& block, std::uint64_t round,
                   const Address& expected_proposer) const;

  std::map<Address, Node> nodes_;
  std::vector<Address> proposers_;
  PermissionTable permissions_;
  LedgerConfig config_;
  std::uint64_t first_fork_round_ = kNoFork;
};

}  // namespace xrg
