// Acceptance gate: eight numbered end-to-end checks, each timed against a
// wall-clock budget and reported as a single PASS/FAIL line.  Run with no
// arguments for the full gate, or with one number (1..8) for a single
// check.  The exit status is the number of failed checks.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/auction_oracle.hpp"
#include "support/grid_oracle.hpp"
#include "support/testrng.hpp"
#include "support/token_oracle.hpp"
#include "xrgsim/address.hpp"
#include "xrgsim/block.hpp"
#include "xrgsim/chain_io.hpp"
#include "xrgsim/grid.hpp"
#include "xrgsim/market.hpp"
#include "xrgsim/metrics.hpp"
#include "xrgsim/scenario.hpp"
#include "xrgsim/simulation.hpp"
#include "xrgsim/token.hpp"
#include "xrgsim/tx.hpp"

using namespace xrg;
using namespace xrg::testing;

namespace {

std::string scenario_path(const char* file) {
#ifdef XRGSIM_SCENARIO_DIR
  return std::string(XRGSIM_SCENARIO_DIR) + "/" + file;
#else
  return std::string("scenarios/") + file;
#endif
}

std::string chain_text(const Chain& chain) {
  std::ostringstream out;
  export_chain(chain, out);
  return out.str();
}

/// Collects failure descriptions; a check passes when none accumulate.
struct Checker {
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok && failures.size() < 16) failures.push_back(what);
  }
};

// ---------------------------------------------------------------------------
// 1. Tamper propagation: corrupting any block is detected at that height,
//    and a re-hashed forgery is caught one block later by the broken link.

Chain twenty_block_chain() {
  const Address proposer = derive_address("acc_validator");
  const Address alice = derive_address("acc_alice");
  const Address bob = derive_address("acc_bob");

  std::vector<Transaction> genesis_txs;
  Transaction seed;
  seed.sender = system_address();
  seed.seq = 0;
  seed.payload = RewardPayload{alice, 1'000'000};
  genesis_txs.push_back(seed);

  Chain chain{make_genesis(std::move(genesis_txs), proposer)};
  for (std::uint64_t round = 1; round <= 20; ++round) {
    Transaction tx;
    tx.sender = alice;
    tx.seq = round;
    tx.payload = TokenTransferPayload{bob, static_cast<Amount>(100 + round), 0};
    append_block(chain, {tx}, proposer, round);
  }
  return chain;
}

void check_tamper_propagation(Checker& c) {
  const Chain chain = twenty_block_chain();
  c.require(chain.tip_height() == 20, "fixture chain should have 20 blocks after genesis");
  c.require(validate_chain(chain).valid, "fixture chain should validate");

  for (std::uint64_t h = 0; h <= chain.tip_height(); ++h) {
    Mutation plain;
    plain.height = h;
    plain.field = BlockField::Timestamp;
    plain.value = 7'777'777;
    const ChainValidity broken = validate_chain(apply_mutation(chain, plain));
    c.require(!broken.valid, "mutated height " + std::to_string(h) + " should invalidate");
    c.require(broken.first_bad_height == h,
              "mutation at " + std::to_string(h) + " should be detected there, got " +
                  std::to_string(broken.first_bad_height));

    Mutation forged = plain;
    forged.rehash = true;
    const ChainValidity relinked = validate_chain(apply_mutation(chain, forged));
    if (h < chain.tip_height()) {
      c.require(!relinked.valid && relinked.first_bad_height == h + 1,
                "re-hashed mutation at " + std::to_string(h) +
                    " should break the link at " + std::to_string(h + 1));
    } else {
      c.require(relinked.valid, "re-hashed tip mutation leaves a self-consistent chain");
    }
  }
}

// ---------------------------------------------------------------------------
// 2. Honest-majority agreement: two byzantine validators out of five cannot
//    finalize anything invalid, and all honest replicas stay bit-identical.

void check_honest_majority(Checker& c) {
  const ScenarioConfig cfg = load_scenario(scenario_path("four_usecases.json"));
  std::size_t dishonest = 0;
  for (const ScenarioValidator& v : cfg.validators) dishonest += v.honest ? 0 : 1;
  c.require(cfg.validators.size() == 5, "scenario should field five validators");
  c.require(dishonest == 2, "scenario should field two byzantine validators");
  c.require(cfg.rounds == 50, "scenario should run 50 rounds");

  const RunResult run = run_simulation(cfg);

  const std::string honest_text = chain_text(run.chain);
  for (const ScenarioValidator& v : cfg.validators) {
    if (!v.honest) continue;
    c.require(chain_text(run.replicas.at(v.id)) == honest_text,
              "honest replica " + v.name + " diverged");
  }

  c.require(validate_chain(run.chain).valid, "honest chain should validate");
  const ReplayAudit audit = replay_audit(run.chain, cfg.build_permissions(), cfg.ledger);
  c.require(audit.metrics.rejected_by_reason.empty(),
            "no finalized transaction should be rejected on replay");
  c.require(run.metrics.fork_events == 0, "a two-node minority cannot fork the network");

  for (const UseCase uc : {UseCase::PeerToPeer, UseCase::InterMicrogrid,
                           UseCase::AncillaryDso, UseCase::EvCharging}) {
    c.require(run.metrics.cleared_by_use_case.at(uc) > 0,
              std::string("use case ") + std::string(to_string(uc)) + " should clear volume");
  }
}

// ---------------------------------------------------------------------------
// 3. 51% attack: three colluding validators finalize a semantically invalid
//    block on their own quorum, and the run records the fork.

void check_majority_attack(Checker& c) {
  const ScenarioConfig cfg = load_scenario(scenario_path("attack_51.json"));
  std::size_t dishonest = 0;
  for (const ScenarioValidator& v : cfg.validators) dishonest += v.honest ? 0 : 1;
  c.require(cfg.validators.size() == 5, "scenario should field five validators");
  c.require(dishonest == 3, "scenario should field three colluding validators");

  const RunResult run = run_simulation(cfg);

  c.require(run.metrics.fork_events >= 1, "the collusion should register fork events");
  c.require(run.metrics.first_fork_round.has_value(), "the first fork round should be recorded");

  c.require(validate_chain(run.chain).valid, "the honest replica should stay valid");
  const PermissionTable perms = cfg.build_permissions();
  const ReplayAudit honest_audit = replay_audit(run.chain, perms, cfg.ledger);
  c.require(honest_audit.metrics.rejected_by_reason.empty(),
            "the honest replica should replay clean");

  bool diverged = false;
  bool poisoned = false;
  for (const auto& [id, replica] : run.replicas) {
    if (replica.tip_hash() == run.chain.tip_hash()) continue;
    diverged = true;
    // The colluders' links are intact; the corruption is semantic.
    if (!validate_chain(replica).valid) continue;
    const MetricsSummary replayed = derive_metrics(replica, perms, cfg.ledger);
    if (!replayed.rejected_by_reason.empty()) poisoned = true;
  }
  c.require(diverged, "the colluding quorum's tip should diverge from the honest tip");
  c.require(poisoned, "a colluder replica should carry transactions that replay refuses");
}

// ---------------------------------------------------------------------------
// 4. Auction oracle equivalence: the clearing engine realizes exactly the
//    maximum-surplus allocation on 1,000 random books.

void check_auction_oracle(Checker& c) {
  TestRng rng(0xACCE55'04ULL);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Offer> offers;
    std::vector<Bid> bids;
    const int n_offers = 1 + static_cast<int>(rng.below(6));
    const int n_bids = 1 + static_cast<int>(rng.below(6));
    for (int i = 0; i < n_offers; ++i) {
      Offer o;
      o.seller = derive_address("acc4_seller_" + std::to_string(i));
      o.quantity_wh = 1 + static_cast<WattHours>(rng.below(100));
      o.unit_price = static_cast<Price>(rng.below(1'000'001));
      o.seq = static_cast<std::uint64_t>(i);
      offers.push_back(o);
    }
    for (int i = 0; i < n_bids; ++i) {
      Bid b;
      b.buyer = derive_address("acc4_buyer_" + std::to_string(i));
      b.quantity_wh = 1 + static_cast<WattHours>(rng.below(100));
      b.budget = static_cast<Amount>(rng.below(10'000'001));
      b.seq = static_cast<std::uint64_t>(100 + i);
      bids.push_back(b);
    }

    const ClearingResult result = clear_double_auction(offers, bids, UseCase::PeerToPeer);
    const OracleSolution realized = realized_surplus(result, offers, bids);
    const OracleSolution best = max_surplus_mcmf(offers, bids);
    c.require(realized.surplus == best.surplus,
              "trial " + std::to_string(trial) + ": surplus " + realized.surplus.str() +
                  " != optimal " + best.surplus.str());
    c.require(realized.traded_wh == best.traded_wh,
              "trial " + std::to_string(trial) + ": volume " +
                  std::to_string(realized.traded_wh) + " != optimal " +
                  std::to_string(best.traded_wh));
    if (!c.failures.empty()) return;
  }
}

// ---------------------------------------------------------------------------
// 5. Token conservation: 10,000 random operations, checked op-for-op against
//    the naive oracle; supply moves only by minted rewards.

void check_token_conservation(Checker& c) {
  std::vector<Address> people;
  for (int i = 0; i < 6; ++i) people.push_back(derive_address("acc5_p" + std::to_string(i)));

  TokenState state;
  NaiveToken naive;
  TestRng rng(0xACCE55'05ULL);
  Amount minted = 0;

  for (int step = 0; step < 10'000; ++step) {
    TokenOp op;
    op.kind = static_cast<TokenOpKind>(rng.below(6));
    op.a = people[rng.below(people.size())];
    op.b = people[rng.below(people.size())];
    op.c = people[rng.below(people.size())];
    op.amount = static_cast<Amount>(rng.below(5'000)) - 50;

    bool ok = false;
    switch (op.kind) {
      case TokenOpKind::Transfer:
        ok = state.transfer(op.a, op.b, op.amount) == TokenError::None;
        break;
      case TokenOpKind::Approve:
        ok = state.approve(op.a, op.b, op.amount) == TokenError::None;
        break;
      case TokenOpKind::TransferFrom:
        ok = state.transfer_from(op.a, op.b, op.c, op.amount) == TokenError::None;
        break;
      case TokenOpKind::Stake:
        ok = state.stake(op.a, op.amount) == TokenError::None;
        break;
      case TokenOpKind::Unstake:
        ok = state.unstake(op.a, op.amount) == TokenError::None;
        break;
      case TokenOpKind::Mint:
        ok = state.mint_reward(op.a, op.amount) == TokenError::None;
        if (ok) minted += op.amount;
        break;
    }

    if (ok != naive.apply(op)) {
      c.require(false, "step " + std::to_string(step) + ": engine and oracle disagree on " +
                           (ok ? "success" : "failure"));
      return;
    }
    if (state.circulating_total() != state.total_supply()) {
      c.require(false, "step " + std::to_string(step) +
                           ": balances+stakes drifted from total supply");
      return;
    }
    if (state.total_supply() != minted) {
      c.require(false, "step " + std::to_string(step) + ": supply changed without a mint");
      return;
    }
  }

  for (const Address& who : people) {
    c.require(state.balance_of(who) == naive.balance(who), "final balance mismatch");
    c.require(state.stake_of(who) == naive.stake(who), "final stake mismatch");
    for (const Address& spender : people) {
      c.require(state.allowance(who, spender) == naive.allowance(who, spender),
                "final allowance mismatch");
    }
  }
  c.require(state.total_supply() == naive.total_supply(), "final supply mismatch");
  c.require(minted == naive.minted(), "minted totals should agree");
}

// ---------------------------------------------------------------------------
// 6. Grid feasibility: on 1,000 random radial feeders, every grant matches
//    the residual-capacity oracle and no edge exceeds its capacity.

void check_grid_feasibility(Checker& c) {
  TestRng rng(0xACCE55'06ULL);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(19);  // 2..20 nodes
    std::vector<std::string> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
    std::vector<FeederEdge> edges;
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t parent = rng.below(i);
      edges.push_back({nodes[parent], nodes[i], 1 + static_cast<Watts>(rng.below(5'000))});
    }

    const FeederGraph graph(nodes, edges, {});
    FlowSchedule schedule(edges.size());

    std::vector<FlowRequest> requests;
    const std::size_t n_requests = 1 + rng.below(40);
    for (std::size_t i = 0; i < n_requests; ++i) {
      requests.push_back({nodes[rng.below(n)], nodes[rng.below(n)],
                          static_cast<Watts>(rng.below(6'001))});
    }

    std::vector<Watts> oracle_residuals;
    const std::vector<OracleGrant> expected =
        replay_flows(nodes, edges, requests, oracle_residuals);

    for (std::size_t i = 0; i < requests.size(); ++i) {
      const FeasibilityResult got =
          check_feasibility(graph, schedule, requests[i].from, requests[i].to,
                            requests[i].amount_w);
      if (got.granted_w != expected[i].granted_w || got.clipped != expected[i].clipped) {
        c.require(false, "trial " + std::to_string(trial) + " request " + std::to_string(i) +
                             ": granted " + std::to_string(got.granted_w) + ", oracle " +
                             std::to_string(expected[i].granted_w));
        return;
      }
    }

    for (std::size_t e = 0; e < edges.size(); ++e) {
      const Watts flow = schedule.flow_on(e);
      if (flow > edges[e].capacity_w || edges[e].capacity_w - flow != oracle_residuals[e]) {
        c.require(false, "trial " + std::to_string(trial) + " edge " + std::to_string(e) +
                             ": flow " + std::to_string(flow) + " vs capacity " +
                             std::to_string(edges[e].capacity_w));
        return;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 7. Determinism and audit: the bundled scenario reproduces byte-identical
//    exports, and replaying the chain reproduces the metrics exactly.

void check_determinism(Checker& c) {
  const ScenarioConfig cfg = load_scenario(scenario_path("brooklyn_p2p.json"));
  const RunResult first = run_simulation(cfg);
  const RunResult second = run_simulation(cfg);

  c.require(chain_text(first.chain) == chain_text(second.chain),
            "two runs of the same scenario should export identical chains");
  c.require(first.metrics == second.metrics, "two runs should report identical metrics");

  const ReplayAudit audit = replay_audit(first.chain, cfg.build_permissions(), cfg.ledger);
  c.require(audit.metrics == first.metrics, "replay should reproduce the live metrics");
  c.require(audit.final_token == first.final_token,
            "replay should reproduce the final token state");
}

// ---------------------------------------------------------------------------
// 8. ERC20 semantics: transfer / approve / transferFrom conformance,
//    including approval overwrite and all-or-nothing failure.

void check_erc20_semantics(Checker& c) {
  const Address alice = derive_address("acc8_alice");
  const Address bob = derive_address("acc8_bob");
  const Address carol = derive_address("acc8_carol");

  TokenState t;
  c.require(t.mint_reward(alice, 1'000) == TokenError::None, "mint should succeed");
  c.require(t.total_supply() == 1'000, "mint should move total supply");

  c.require(t.transfer(alice, bob, 300) == TokenError::None, "funded transfer should pass");
  c.require(t.balance_of(alice) == 700 && t.balance_of(bob) == 300,
            "transfer should move exactly the amount");

  c.require(t.transfer(alice, bob, 701) == TokenError::InsufficientBalance,
            "overdraft should be refused");
  c.require(t.balance_of(alice) == 700 && t.balance_of(bob) == 300,
            "failed transfer must not move funds");

  c.require(t.transfer(alice, bob, -1) == TokenError::NegativeAmount,
            "negative transfer should be refused");
  c.require(t.transfer(alice, bob, 0) == TokenError::None, "zero transfer is a no-op");
  c.require(t.transfer(alice, alice, 50) == TokenError::None, "self transfer is a no-op");
  c.require(t.balance_of(alice) == 700, "self transfer must not change the balance");

  c.require(t.approve(alice, carol, 100) == TokenError::None, "approve should succeed");
  c.require(t.allowance(alice, carol) == 100, "allowance should be set");
  c.require(t.approve(alice, carol, 30) == TokenError::None, "re-approve should succeed");
  c.require(t.allowance(alice, carol) == 30, "re-approve overwrites, never adds");
  c.require(t.allowance(carol, alice) == 0, "allowances are directional");

  c.require(t.transfer_from(carol, alice, bob, 20) == TokenError::None,
            "transfer_from within allowance should pass");
  c.require(t.allowance(alice, carol) == 10, "transfer_from should debit the allowance");
  c.require(t.balance_of(alice) == 680 && t.balance_of(bob) == 320,
            "transfer_from should move the funds");

  c.require(t.transfer_from(carol, alice, bob, 11) == TokenError::InsufficientAllowance,
            "transfer_from beyond the allowance should be refused");
  c.require(t.allowance(alice, carol) == 10 && t.balance_of(alice) == 680 &&
                t.balance_of(bob) == 320,
            "failed transfer_from must change nothing");

  // Allowance above the owner's balance: the balance guard fires and the
  // allowance survives untouched.
  c.require(t.approve(alice, carol, 1'000'000) == TokenError::None,
            "approve above balance is legal");
  c.require(t.transfer_from(carol, alice, bob, 681) == TokenError::InsufficientBalance,
            "transfer_from beyond the balance should be refused");
  c.require(t.allowance(alice, carol) == 1'000'000 && t.balance_of(alice) == 680,
            "failed transfer_from must not debit the allowance");

  c.require(t.transfer_from(carol, alice, bob, 0) == TokenError::None,
            "zero transfer_from is a no-op");
  c.require(t.approve(alice, carol, 0) == TokenError::None, "zero approve clears");
  c.require(t.allowance(alice, carol) == 0, "cleared allowance should read zero");

  c.require(t.total_supply() == 1'000, "no non-mint operation may move supply");
  c.require(t.circulating_total() == t.total_supply(), "balances must add up to supply");
}

// ---------------------------------------------------------------------------

struct Criterion {
  int number;
  const char* name;
  double budget_seconds;  // 0 = untimed
  void (*fn)(Checker&);
};

const Criterion kCriteria[] = {
    {1, "tamper propagation", 1.0, check_tamper_propagation},
    {2, "honest-majority agreement", 5.0, check_honest_majority},
    {3, "51% attack fork", 0.0, check_majority_attack},
    {4, "auction oracle equivalence", 30.0, check_auction_oracle},
    {5, "token conservation", 5.0, check_token_conservation},
    {6, "grid feasibility", 10.0, check_grid_feasibility},
    {7, "determinism and audit", 5.0, check_determinism},
    {8, "erc20 semantics", 1.0, check_erc20_semantics},
};

int run_criterion(const Criterion& crit) {
  Checker checker;
  const auto start = std::chrono::steady_clock::now();
  try {
    crit.fn(checker);
  } catch (const std::exception& e) {
    checker.require(false, std::string("unhandled exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (crit.budget_seconds > 0 && elapsed > crit.budget_seconds) {
    char over[96];
    std::snprintf(over, sizeof over, "time budget exceeded: %.3f s > %.1f s", elapsed,
                  crit.budget_seconds);
    checker.require(false, over);
  }

  const bool pass = checker.failures.empty();
  std::printf("%s  %d  %-28s %8.3f s\n", pass ? "PASS" : "FAIL", crit.number, crit.name,
              elapsed);
  for (const std::string& failure : checker.failures) {
    std::printf("        - %s\n", failure.c_str());
  }
  std::fflush(stdout);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  if (argc > 2) {
    std::fprintf(stderr, "usage: %s [criterion 1..8]\n", argv[0]);
    return 64;
  }
  if (argc == 2) {
    selected = std::atoi(argv[1]);
    if (selected < 1 || selected > 8) {
      std::fprintf(stderr, "usage: %s [criterion 1..8]\n", argv[0]);
      return 64;
    }
  }

  int failures = 0;
  for (const Criterion& crit : kCriteria) {
    if (selected != 0 && crit.number != selected) continue;
    failures += run_criterion(crit);
  }
  return failures;
}
