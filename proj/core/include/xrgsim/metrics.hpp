#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "xrgsim/address.hpp"
#include "xrgsim/amounts.hpp"
#include "xrgsim/block.hpp"
#include "xrgsim/hash.hpp"
#include "xrgsim/orders.hpp"
#include "xrgsim/permissions.hpp"
#include "xrgsim/state.hpp"
#include "xrgsim/token.hpp"

namespace xrg {

/// One metrics row: activity of one use case in one round.  `cleared_quantity`
/// is Wh for energy and EV charging, W of capacity for ancillary procurement.
struct UseCaseRoundRow {
  std::uint64_t round = 0;
  UseCase use_case = UseCase::PeerToPeer;
  std::uint64_t orders_posted = 0;
  std::uint64_t fills = 0;
  std::int64_t cleared_quantity = 0;
  Amount payments = 0;
  /// Set when every fill of the round shares one price (the uniform-price
  /// auctions); pay-as-bid and EV rounds normally leave it unset.
  bool has_clearing_price = false;
  Price clearing_price = 0;
  Watts unmet_capacity_w = 0;

  bool operator==(const UseCaseRoundRow&) const = default;
};

/// Ledger-level activity of one finalized block.
struct RoundStats {
  std::uint64_t round = 0;
  std::uint64_t height = 0;
  Address proposer;
  std::uint64_t txs_applied = 0;
  std::uint64_t txs_rejected = 0;
  Amount token_transferred = 0;
  Amount rewards_minted = 0;

  bool operator==(const RoundStats&) const = default;
};

/// Everything below fork_events is recomputed from the chain alone, so a
/// replay of the exported chain reproduces it field for field.  Fork events
/// are a network observation — a single replica cannot exhibit the fork it
/// refused to follow — and stay zero under replay.
struct MetricsSummary {
  std::vector<UseCaseRoundRow> rows;  // four per round, rounds 1..tip
  std::vector<RoundStats> rounds;     // one per finalized block
  std::uint64_t blocks_finalized = 0;
  Amount genesis_supply = 0;
  Amount final_total_supply = 0;
  Amount total_token_transferred = 0;
  Amount total_rewards_minted = 0;
  std::uint64_t total_fills = 0;
  std::map<UseCase, std::int64_t> cleared_by_use_case;
  std::map<TxRejectReason, std::uint64_t> rejected_by_reason;

  std::uint64_t fork_events = 0;
  std::optional<std::uint64_t> first_fork_round;

  bool operator==(const MetricsSummary&) const = default;
};

/// Per-round network observations from a live run: votes, finalization,
/// and the rejections that never reach the chain (admission and block
/// assembly).  Not reproducible from the chain; reported alongside it.
struct LiveRound {
  std::uint64_t round = 0;
  Address proposer;
  bool finalized = false;
  std::uint64_t votes_for = 0;
  std::uint64_t votes_against = 0;
  bool fork_event = false;
  std::uint64_t admission_rejected = 0;
  std::uint64_t assembly_rejected = 0;

  bool operator==(const LiveRound&) const = default;
};

struct LiveStats {
  std::vector<LiveRound> rounds;
  std::uint64_t rounds_unfinalized = 0;
  std::map<TxRejectReason, std::uint64_t> admission_rejected_by_reason;
  std::map<TxRejectReason, std::uint64_t> assembly_rejected_by_reason;
  std::map<Address, Hash> replica_tips;

  bool operator==(const LiveStats&) const = default;
};

/// Replays the chain transaction by transaction (same engine as the nodes)
/// and aggregates the metrics.  The permission table and constants must
/// match the ones the chain was produced under.
MetricsSummary derive_metrics(const Chain& chain, const PermissionTable& permissions,
                              const LedgerConfig& config);

struct ReplayAudit {
  MetricsSummary metrics;
  TokenState final_token;
};

ReplayAudit replay_audit(const Chain& chain, const PermissionTable& permissions,
                         const LedgerConfig& config);

/// Fixed column order:
/// round,use_case,orders_posted,fills,cleared_quantity,clearing_price,payments,unmet_capacity_w
void write_metrics_csv(const MetricsSummary& metrics, std::ostream& out);

/// Machine-readable run summary.  `live` may be null (replay has none);
/// when present its observations land under a separate "network" key.
void write_summary_json(const MetricsSummary& metrics, const LiveStats* live,
                        const std::string& scenario_name, std::ostream& out);

/// One JSON line of token state per block, oldest first.
void write_token_audit(const Chain& chain, const PermissionTable& permissions,
                       const LedgerConfig& config, std::ostream& out);

}  // namespace xrg
