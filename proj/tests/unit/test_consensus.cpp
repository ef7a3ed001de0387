#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "xrgsim/address.hpp"
#include "xrgsim/block.hpp"
#include "xrgsim/consensus.hpp"
#include "xrgsim/state.hpp"
#include "xrgsim/tx.hpp"

using namespace xrg;

namespace {

struct Fixture {
  std::vector<ValidatorSpec> specs;
  PermissionTable perms;
  LedgerConfig config;
  std::vector<Transaction> genesis;
  std::vector<Address> ids;  // insertion order, not rotation order

  void add_validator(const std::string& name, NodeRole role, bool honest = true,
                     AttackPlan attack = {}) {
    ValidatorSpec spec;
    spec.id = derive_address(name);
    spec.role = role;
    spec.honest = honest;
    spec.attack = attack;
    specs.push_back(spec);
    ids.push_back(spec.id);
    perms.grant(ActionKind::Vote, spec.id);
    if (role == NodeRole::Controller) perms.grant(ActionKind::ProposeBlock, spec.id);
  }

  void fund(const std::string& name, Amount amount) {
    const Address who = derive_address(name);
    Transaction tx;
    tx.sender = system_address();
    tx.seq = genesis.size();
    tx.payload = RewardPayload{who, amount};
    genesis.push_back(tx);
    perms.grant(ActionKind::PostOffer, who);
    perms.grant(ActionKind::PostBid, who);
  }

  Network build() { return Network(specs, perms, config, genesis); }
};

Transaction transfer_tx(const std::string& from, const std::string& to, Amount amount,
                        std::uint64_t seq) {
  Transaction tx;
  tx.sender = derive_address(from);
  tx.seq = seq;
  tx.payload = TokenTransferPayload{derive_address(to), amount, 0};
  return tx;
}

}  // namespace

TEST_SUITE("consensus") {

TEST_CASE("all replicas start from one shared genesis") {
  Fixture fx;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Controller);
  fx.add_validator("v_gamma", NodeRole::Verifier);
  fx.fund("user_one", 50 * kUnitsPerXrg);
  Network net = fx.build();

  CHECK(net.validator_count() == 3);
  const Block& genesis = net.genesis();
  CHECK(genesis.height == 0);
  for (const auto& [id, node] : net.nodes()) {
    REQUIRE(node.replica.blocks().size() == 1);
    CHECK(node.replica.blocks()[0] == genesis);
    CHECK(node.state.token().balance_of(derive_address("user_one")) == 50 * kUnitsPerXrg);
  }
}

TEST_CASE("proposers rotate over controllers in address order") {
  Fixture fx;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Verifier);
  fx.add_validator("v_gamma", NodeRole::Controller);
  fx.add_validator("v_delta", NodeRole::Controller);
  Network net = fx.build();

  const std::vector<Address>& rotation = net.proposer_rotation();
  REQUIRE(rotation.size() == 3);  // verifiers never propose
  for (std::size_t i = 1; i < rotation.size(); ++i) {
    CHECK(rotation[i - 1].value < rotation[i].value);
  }

  // Six rounds walk the rotation twice, in order.
  for (std::uint64_t round = 1; round <= 6; ++round) {
    const ProposalOutcome out = net.run_round(round);
    CHECK(out.proposer == rotation[round % rotation.size()]);
    CHECK(out.finalized);
  }
}

TEST_CASE("an honest majority finalizes and appends everywhere") {
  Fixture fx;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Controller);
  fx.add_validator("v_gamma", NodeRole::Verifier);
  fx.fund("user_one", 50 * kUnitsPerXrg);
  fx.fund("user_two", 50 * kUnitsPerXrg);
  Network net = fx.build();

  CHECK(net.submit_transaction(transfer_tx("user_one", "user_two", 1000, 0)) ==
        TxRejectReason::None);
  const ProposalOutcome out = net.run_round(1);
  CHECK(out.finalized);
  CHECK(out.votes_for == 3);
  CHECK(out.votes_against == 0);
  CHECK(out.appended_by.size() == 3);
  CHECK_FALSE(out.fork_event);
  CHECK(out.block.transactions.size() == 1);

  for (const auto& [id, node] : net.nodes()) {
    CHECK(node.replica.tip_height() == 1);
    CHECK(node.replica.tip() == out.block);
    CHECK(node.state.token().balance_of(derive_address("user_two")) ==
          50 * kUnitsPerXrg + 1000);
    CHECK(node.mempool.empty());
  }
}

TEST_CASE("submission runs the same admission checks as application") {
  Fixture fx;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Controller);
  fx.add_validator("v_gamma", NodeRole::Verifier);
  fx.fund("user_one", 50 * kUnitsPerXrg);
  Network net = fx.build();

  // Broke sender: admission is structural only, so this is accepted now
  // and bounced at application time.
  CHECK(net.submit_transaction(transfer_tx("user_one", "user_two", 500 * kUnitsPerXrg, 0)) ==
        TxRejectReason::None);

  // Duplicate of a pending (sender, seq) pair.
  CHECK(net.submit_transaction(transfer_tx("user_one", "user_two", 1, 0)) ==
        TxRejectReason::DuplicateSeq);

  // Forged reward.
  Transaction forged;
  forged.sender = derive_address("user_one");
  forged.seq = 1;
  forged.payload = RewardPayload{derive_address("user_one"), kUnitsPerXrg};
  CHECK(net.submit_transaction(forged) == TxRejectReason::PermissionDenied);

  const ProposalOutcome out = net.run_round(1);
  CHECK(out.finalized);
  CHECK(out.block.transactions.empty());  // the overdraft was dropped at assembly
  CHECK(out.assembly_rejections.at(TxRejectReason::InsufficientBalance) == 1);
}

TEST_CASE("honest voters reject structurally broken proposals") {
  // Two honest validators out of three: the dishonest proposer's own yes
  // vote never reaches a majority.
  Fixture fx;
  AttackPlan forge;
  forge.action = AttackAction::ForgeHash;
  forge.always = true;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Controller);
  fx.add_validator("v_gamma", NodeRole::Controller, false, forge);
  Network net = fx.build();

  const std::vector<Address>& rotation = net.proposer_rotation();
  const Address bad = derive_address("v_gamma");

  std::size_t bad_rounds = 0;
  for (std::uint64_t round = 1; round <= 6; ++round) {
    const ProposalOutcome out = net.run_round(round);
    if (rotation[round % rotation.size()] == bad) {
      ++bad_rounds;
      CHECK_FALSE(out.finalized);
      CHECK(out.votes_for == 1);  // only the attacker approves of itself
      CHECK(out.votes_against == 2);
    } else {
      CHECK(out.finalized);
    }
  }
  CHECK(bad_rounds == 2);
  CHECK_FALSE(net.forked());

  // Honest replicas skipped the bad rounds entirely.
  CHECK(net.honest_node().replica.tip_height() == 4);
}

TEST_CASE("a vetoed round leaves replicas and mempools untouched") {
  Fixture fx;
  AttackPlan forge;
  forge.action = AttackAction::ForgeHash;
  forge.always = true;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Controller);
  fx.add_validator("v_gamma", NodeRole::Controller, false, forge);
  fx.fund("user_one", 50 * kUnitsPerXrg);
  fx.fund("user_two", 50 * kUnitsPerXrg);
  Network net = fx.build();

  REQUIRE(net.submit_transaction(transfer_tx("user_one", "user_two", 1000, 0)) ==
          TxRejectReason::None);

  // Rounds 1..3 walk the full rotation, so exactly one is the attacker's.
  bool saw_veto = false;
  std::uint64_t landed_round = 0;
  for (std::uint64_t round = 1; round <= 3; ++round) {
    const std::uint64_t tip_before = net.honest_node().replica.tip_height();
    const bool pending_before = !net.honest_node().mempool.empty();
    const ProposalOutcome out = net.run_round(round);
    if (!out.finalized) {
      saw_veto = true;
      for (const auto& [id, node] : net.nodes()) {
        CHECK(node.replica.tip_height() == tip_before);
        CHECK(node.mempool.size() == (pending_before ? 1 : 0));
      }
    } else if (pending_before) {
      // The held-over transfer lands in the first finalized block, stamped
      // with that later round.
      REQUIRE(out.block.transactions.size() == 1);
      CHECK(out.block.timestamp == round);
      landed_round = round;
      for (const auto& [id, node] : net.nodes()) CHECK(node.mempool.empty());
    } else {
      CHECK(out.block.transactions.empty());
    }
  }
  CHECK(saw_veto);
  CHECK(landed_round != 0);
  CHECK_FALSE(net.forked());
}

TEST_CASE("a dishonest majority finalizes over honest objections and forks") {
  Fixture fx;
  AttackPlan forge;
  forge.action = AttackAction::ForgeHash;
  forge.always = true;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Controller, false, forge);
  fx.add_validator("v_gamma", NodeRole::Controller, false, forge);
  Network net = fx.build();

  const std::vector<Address>& rotation = net.proposer_rotation();
  const Address honest_id = derive_address("v_alpha");

  bool saw_fork = false;
  for (std::uint64_t round = 1; round <= 3; ++round) {
    const ProposalOutcome out = net.run_round(round);
    if (rotation[round % rotation.size()] == honest_id) {
      CHECK(out.votes_for == 3);
      continue;
    }
    // Two colluders outvote one honest node...
    CHECK(out.finalized);
    CHECK(out.votes_for == 2);
    CHECK(out.votes_against == 1);
    // ...but the honest replica refuses the forged block.
    CHECK(out.fork_event);
    saw_fork = true;
    for (const Address& appender : out.appended_by) CHECK(appender != honest_id);
  }
  REQUIRE(saw_fork);
  CHECK(net.forked());
  CHECK(net.first_fork_round() >= 1);

  // The honest chain stays valid; the colluders' does not.
  CHECK(validate_chain(net.node(honest_id).replica).valid);
  CHECK_FALSE(validate_chain(net.node(derive_address("v_beta")).replica).valid);
  CHECK(net.node(honest_id).replica.tip_height() <
        net.node(derive_address("v_beta")).replica.tip_height());
}

TEST_CASE("invalid-transaction attacks are caught by scratch application") {
  Fixture fx;
  AttackPlan bad_tx;
  bad_tx.action = AttackAction::InvalidTx;
  bad_tx.always = true;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Controller);
  fx.add_validator("v_gamma", NodeRole::Controller, false, bad_tx);
  Network net = fx.build();

  const std::vector<Address>& rotation = net.proposer_rotation();
  const Address bad = derive_address("v_gamma");
  for (std::uint64_t round = 1; round <= 6; ++round) {
    const ProposalOutcome out = net.run_round(round);
    if (rotation[round % rotation.size()] == bad) {
      CHECK_FALSE(out.finalized);
      // The forged self-mint is really in the proposed block.
      bool has_self_mint = false;
      for (const Transaction& tx : out.block.transactions) {
        if (tx.kind() == TxKind::Reward && tx.sender != system_address()) {
          has_self_mint = true;
        }
      }
      CHECK(has_self_mint);
    } else {
      CHECK(out.finalized);
    }
  }
  CHECK_FALSE(net.forked());
}

TEST_CASE("fork resolution prefers the longest valid chain") {
  const Address proposer = derive_address("v_alpha");
  Chain base{make_genesis({}, proposer)};
  Chain longer = base;
  append_block(longer, {}, proposer, 1);
  append_block(longer, {}, proposer, 2);
  Chain shorter = base;
  append_block(shorter, {}, proposer, 1);

  SUBCASE("longest wins") {
    std::vector<Chain> candidates{shorter, longer};
    CHECK(resolve_fork(candidates) == longer);
  }
  SUBCASE("invalid candidates are disqualified regardless of length") {
    Chain corrupt = longer;
    append_block(corrupt, {}, proposer, 3);
    corrupt.blocks_mutable()[2].timestamp = 9999;
    std::vector<Chain> candidates{corrupt, shorter};
    CHECK(resolve_fork(candidates) == shorter);
  }
  SUBCASE("a length tie breaks toward the smaller tip hash") {
    Chain other = base;
    append_block(other, {}, derive_address("v_beta"), 1);
    std::vector<Chain> candidates{shorter, other};
    const Chain winner = resolve_fork(candidates);
    const Chain& expected =
        shorter.tip_hash().to_hex() < other.tip_hash().to_hex() ? shorter : other;
    CHECK(winner == expected);
    // Symmetric input order, same winner.
    std::vector<Chain> reversed{other, shorter};
    CHECK(resolve_fork(reversed) == expected);
  }
  SUBCASE("nothing valid throws") {
    Chain corrupt = longer;
    corrupt.blocks_mutable()[1].proposer = derive_address("nobody");
    std::vector<Chain> candidates{corrupt};
    CHECK_THROWS_AS(resolve_fork(candidates), NoValidCandidateError);
  }
}

TEST_CASE("sync_node adopts the resolution winner and rebuilds state") {
  Fixture fx;
  AttackPlan forge;
  forge.action = AttackAction::ForgeHash;
  forge.always = true;
  fx.add_validator("v_alpha", NodeRole::Controller);
  fx.add_validator("v_beta", NodeRole::Controller, false, forge);
  fx.add_validator("v_gamma", NodeRole::Controller, false, forge);
  fx.fund("user_one", 50 * kUnitsPerXrg);
  Network net = fx.build();

  for (std::uint64_t round = 1; round <= 5; ++round) net.run_round(round);
  REQUIRE(net.forked());

  const Address honest_id = derive_address("v_alpha");
  const Address colluder = derive_address("v_beta");
  REQUIRE(net.node(colluder).replica.tip_height() >
          net.node(honest_id).replica.tip_height());

  // Resolution among {honest chain, forged chain}: the forged chain is
  // longer but invalid, so the colluder snaps back to the honest one.
  std::vector<Chain> candidates{net.node(honest_id).replica, net.node(colluder).replica};
  net.sync_node(colluder, candidates);
  CHECK(net.node(colluder).replica == net.node(honest_id).replica);
  CHECK(net.node(colluder).state.token().balance_of(derive_address("user_one")) ==
        50 * kUnitsPerXrg);
}

}  // TEST_SUITE
