#include "xrgsim/metrics.hpp"

#include <algorithm>
#include <ostream>
#include <string>
#include <variant>

#include <json.hpp>

#include "xrgsim/chain_io.hpp"

namespace xrg {
namespace {

constexpr UseCase kAllUseCases[] = {UseCase::PeerToPeer, UseCase::InterMicrogrid,
                                    UseCase::AncillaryDso, UseCase::EvCharging};

struct PriceTrack {
  bool any = false;
  bool uniform = true;
  Price price = 0;

  void observe(Price p) {
    if (!any) {
      any = true;
      price = p;
    } else if (p != price) {
      uniform = false;
    }
  }
};

// Replays the chain with the canonical engine, attributing what it sees to
// (round, use case) cells.  Used identically by the live driver (on its
// honest replica) and by offline replay, which is what makes the two
// summaries comparable field by field.
struct ChainWalker {
  LedgerState state;
  MetricsSummary metrics;
  std::map<std::pair<std::uint64_t, UseCase>, UseCaseRoundRow> cells;
  std::map<std::pair<std::uint64_t, UseCase>, PriceTrack> prices;
  std::map<std::uint64_t, Watts> required_capacity;  // ancillary need per round

  explicit ChainWalker(const PermissionTable& permissions, const LedgerConfig& config)
      : state(permissions, config) {}

  UseCaseRoundRow& cell(std::uint64_t round, UseCase uc) {
    UseCaseRoundRow& row = cells[{round, uc}];
    row.round = round;
    row.use_case = uc;
    return row;
  }

  void walk(const Chain& chain) {
    for (const Block& block : chain.blocks()) {
      if (block.height == 0) {
        for (const Transaction& tx : block.transactions) state.apply(tx);
        metrics.genesis_supply = state.token().total_supply();
        continue;
      }
      observe_block(block);
    }
    finish(chain);
  }

  void observe_block(const Block& block) {
    const std::uint64_t round = block.timestamp;
    RoundStats stats;
    stats.round = round;
    stats.height = block.height;
    stats.proposer = block.proposer;

    for (const Transaction& tx : block.transactions) {
      const TxRejectReason verdict = state.apply(tx);
      if (verdict != TxRejectReason::None) {
        ++stats.txs_rejected;
        ++metrics.rejected_by_reason[verdict];
        continue;
      }
      ++stats.txs_applied;

      if (const auto* post = std::get_if<DataPostPayload>(&tx.payload)) {
        const UseCase uc = use_case_of(post->order);
        ++cell(round, uc).orders_posted;
        if (const auto* req = std::get_if<AncillaryRequirement>(&post->order)) {
          required_capacity[round] += req->capacity_w;
        }
      } else if (const auto* rec = std::get_if<TradeSettlementPayload>(&tx.payload)) {
        UseCaseRoundRow& row = cell(round, rec->use_case);
        ++row.fills;
        row.cleared_quantity += rec->quantity;
        row.payments += rec->payment;
        prices[{round, rec->use_case}].observe(rec->unit_price);
      } else if (const auto* transfer = std::get_if<TokenTransferPayload>(&tx.payload)) {
        stats.token_transferred += transfer->amount;
      } else if (const auto* reward = std::get_if<RewardPayload>(&tx.payload)) {
        stats.rewards_minted += reward->amount;
      }
    }

    metrics.total_token_transferred += stats.token_transferred;
    metrics.total_rewards_minted += stats.rewards_minted;
    metrics.rounds.push_back(std::move(stats));
  }

  void finish(const Chain& chain) {
    metrics.blocks_finalized = chain.empty() ? 0 : chain.blocks().size() - 1;
    metrics.final_total_supply = state.token().total_supply();

    for (auto& [round, required] : required_capacity) {
      UseCaseRoundRow& row = cell(round, UseCase::AncillaryDso);
      row.unmet_capacity_w = std::max<Watts>(0, required - row.cleared_quantity);
    }

    const std::uint64_t last_round =
        chain.empty() ? 0 : chain.tip().timestamp;
    for (std::uint64_t round = 1; round <= last_round; ++round) {
      for (const UseCase uc : kAllUseCases) {
        UseCaseRoundRow row = cell(round, uc);  // materializes zero rows too
        const auto pit = prices.find({round, uc});
        if (pit != prices.end() && pit->second.any && pit->second.uniform &&
            row.fills > 0) {
          row.has_clearing_price = true;
          row.clearing_price = pit->second.price;
        }
        metrics.total_fills += row.fills;
        metrics.cleared_by_use_case[uc] += row.cleared_quantity;
        metrics.rows.push_back(row);
      }
    }
    // Every use case gets a totals entry even when it never traded.
    for (const UseCase uc : kAllUseCases) metrics.cleared_by_use_case[uc];
  }
};

nlohmann::ordered_json reason_map_json(
    const std::map<TxRejectReason, std::uint64_t>& by_reason) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [reason, count] : by_reason) {
    j[std::string(to_string(reason))] = count;
  }
  return j;
}

}  // namespace

MetricsSummary derive_metrics(const Chain& chain, const PermissionTable& permissions,
                              const LedgerConfig& config) {
  ChainWalker walker(permissions, config);
  walker.walk(chain);
  return std::move(walker.metrics);
}

ReplayAudit replay_audit(const Chain& chain, const PermissionTable& permissions,
                         const LedgerConfig& config) {
  ChainWalker walker(permissions, config);
  walker.walk(chain);
  return {std::move(walker.metrics), walker.state.token()};
}

void write_metrics_csv(const MetricsSummary& metrics, std::ostream& out) {
  out << "round,use_case,orders_posted,fills,cleared_quantity,clearing_price,"
         "payments,unmet_capacity_w\n";
  for (const UseCaseRoundRow& row : metrics.rows) {
    out << row.round << ',' << to_string(row.use_case) << ','
        << row.orders_posted << ',' << row.fills << ',' << row.cleared_quantity
        << ',';
    if (row.has_clearing_price) out << row.clearing_price;
    out << ',' << row.payments << ',' << row.unmet_capacity_w << '\n';
  }
}

void write_summary_json(const MetricsSummary& metrics, const LiveStats* live,
                        const std::string& scenario_name, std::ostream& out) {
  using nlohmann::ordered_json;

  ordered_json cleared = ordered_json::object();
  for (const auto& [uc, quantity] : metrics.cleared_by_use_case) {
    cleared[to_string(uc)] = quantity;
  }

  ordered_json rounds = ordered_json::array();
  for (const RoundStats& r : metrics.rounds) {
    rounds.push_back({{"round", r.round},
                      {"height", r.height},
                      {"proposer", r.proposer.value},
                      {"txs_applied", r.txs_applied},
                      {"txs_rejected", r.txs_rejected},
                      {"token_transferred", r.token_transferred},
                      {"rewards_minted", r.rewards_minted}});
  }

  ordered_json j{{"scenario", scenario_name},
                 {"blocks_finalized", metrics.blocks_finalized},
                 {"genesis_supply", metrics.genesis_supply},
                 {"final_total_supply", metrics.final_total_supply},
                 {"total_token_transferred", metrics.total_token_transferred},
                 {"total_rewards_minted", metrics.total_rewards_minted},
                 {"total_fills", metrics.total_fills},
                 {"cleared_by_use_case", std::move(cleared)},
                 {"rejected_by_reason", reason_map_json(metrics.rejected_by_reason)},
                 {"fork_events", metrics.fork_events},
                 {"first_fork_round", nullptr},
                 {"rounds", std::move(rounds)}};
  if (metrics.first_fork_round) j["first_fork_round"] = *metrics.first_fork_round;

  if (live != nullptr) {
    ordered_json live_rounds = ordered_json::array();
    for (const LiveRound& r : live->rounds) {
      live_rounds.push_back({{"round", r.round},
                             {"proposer", r.proposer.value},
                             {"finalized", r.finalized},
                             {"votes_for", r.votes_for},
                             {"votes_against", r.votes_against},
                             {"fork_event", r.fork_event},
                             {"admission_rejected", r.admission_rejected},
                             {"assembly_rejected", r.assembly_rejected}});
    }
    ordered_json tips = ordered_json::object();
    for (const auto& [id, tip] : live->replica_tips) tips[id.value] = tip.to_hex();
    j["network"] = {
        {"rounds_unfinalized", live->rounds_unfinalized},
        {"admission_rejected_by_reason",
         reason_map_json(live->admission_rejected_by_reason)},
        {"assembly_rejected_by_reason",
         reason_map_json(live->assembly_rejected_by_reason)},
        {"replica_tips", std::move(tips)},
        {"rounds", std::move(live_rounds)},
    };
  }

  out << j.dump(2) << '\n';
}

void write_token_audit(const Chain& chain, const PermissionTable& permissions,
                       const LedgerConfig& config, std::ostream& out) {
  LedgerState state(permissions, config);
  for (const Block& block : chain.blocks()) {
    for (const Transaction& tx : block.transactions) state.apply(tx);
    append_token_snapshot(out, state.token(), block.height);
  }
}

}  // namespace xrg
