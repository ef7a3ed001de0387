#include "xrgsim/simulation.hpp"

#include <algorithm>
#include <random>
#include <utility>
#include <variant>

#include "xrgsim/consensus.hpp"
#include "xrgsim/market.hpp"

namespace xrg {
namespace {

const Address& order_owner(const OrderData& order) {
  return std::visit(
      [](const auto& o) -> const Address& {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Offer>) return o.seller;
        else if constexpr (std::is_same_v<T, Bid>) return o.buyer;
        else if constexpr (std::is_same_v<T, AncillaryOffer>) return o.provider;
        else if constexpr (std::is_same_v<T, AncillaryRequirement>) return o.poster;
        else if constexpr (std::is_same_v<T, EvseOffer>) return o.station;
        else if constexpr (std::is_same_v<T, EvBid>) return o.vehicle;
        else return o.poster;  // NetworkConstraint
      },
      order);
}

void set_book_seq(OrderData& order, std::uint64_t seq) {
  std::visit([seq](auto& o) { o.seq = seq; }, order);
}

std::int64_t jittered(std::int64_t quantity, int pct, std::mt19937_64& rng) {
  const std::int64_t p = pct;
  const std::int64_t j = static_cast<std::int64_t>(rng() % (2 * p + 1)) - p;
  return std::max<std::int64_t>(1, quantity + quantity * j / 100);
}

/// Perturbs the quantity-like field of the order by up to +/- pct percent.
/// Constraints carry no quantity to jitter and leave the RNG untouched.
void apply_jitter(OrderData& order, int pct, std::mt19937_64& rng) {
  if (pct <= 0) return;
  if (auto* o = std::get_if<Offer>(&order)) {
    o->quantity_wh = jittered(o->quantity_wh, pct, rng);
  } else if (auto* b = std::get_if<Bid>(&order)) {
    b->quantity_wh = jittered(b->quantity_wh, pct, rng);
  } else if (auto* a = std::get_if<AncillaryOffer>(&order)) {
    a->capacity_w = jittered(a->capacity_w, pct, rng);
  } else if (auto* r = std::get_if<AncillaryRequirement>(&order)) {
    r->capacity_w = jittered(r->capacity_w, pct, rng);
  } else if (auto* e = std::get_if<EvseOffer>(&order)) {
    e->max_power_w = jittered(e->max_power_w, pct, rng);
  } else if (auto* v = std::get_if<EvBid>(&order)) {
    v->demand_wh = jittered(v->demand_wh, pct, rng);
  }
}

/// This round's admitted orders, routed by segment.
struct RoundBook {
  std::vector<Offer> p2p_offers;
  std::vector<Bid> p2p_bids;
  std::vector<Offer> mg_offers;
  std::vector<Bid> mg_bids;
  std::vector<AncillaryOffer> ancillary_offers;
  std::vector<AncillaryRequirement> ancillary_requirements;
  std::vector<EvseOffer> evse_offers;
  std::vector<EvBid> ev_bids;
  std::vector<NetworkConstraint> constraints;

  void add(const OrderData& order) {
    if (const auto* o = std::get_if<Offer>(&order)) {
      (o->use_case == UseCase::InterMicrogrid ? mg_offers : p2p_offers).push_back(*o);
    } else if (const auto* b = std::get_if<Bid>(&order)) {
      (b->use_case == UseCase::InterMicrogrid ? mg_bids : p2p_bids).push_back(*b);
    } else if (const auto* a = std::get_if<AncillaryOffer>(&order)) {
      ancillary_offers.push_back(*a);
    } else if (const auto* r = std::get_if<AncillaryRequirement>(&order)) {
      ancillary_requirements.push_back(*r);
    } else if (const auto* e = std::get_if<EvseOffer>(&order)) {
      evse_offers.push_back(*e);
    } else if (const auto* v = std::get_if<EvBid>(&order)) {
      ev_bids.push_back(*v);
    } else if (const auto* c = std::get_if<NetworkConstraint>(&order)) {
      constraints.push_back(*c);
    }
  }
};

}  // namespace

RunResult run_simulation(const ScenarioConfig& config) {
  const PermissionTable permissions = config.build_permissions();
  const std::vector<Transaction> genesis_txs = config.genesis_transactions();
  Network net(config.validator_specs(), permissions, config.ledger, genesis_txs);
  const FeederGraph grid = config.build_grid();

  // Sequence counters resume after the genesis allocations.
  std::map<Address, std::uint64_t> next_seq;
  for (const Transaction& tx : genesis_txs) {
    std::uint64_t& n = next_seq[tx.sender];
    n = std::max(n, tx.seq + 1);
  }
  SeqAllocator seqs(next_seq);

  std::mt19937_64 rng(config.seed);
  std::uint64_t next_fill_id = 1;
  std::uint64_t book_seq = 0;

  // Constraints persist from their posting round onward; EV books carry
  // unmatched orders while their windows stay open.
  std::vector<NetworkConstraint> active_constraints;
  std::vector<EvseOffer> evse_book;
  std::vector<EvBid> ev_book;

  LiveStats live;
  std::uint64_t fork_events = 0;

  std::size_t script_pos = 0;
  for (std::uint64_t round = 1; round <= config.rounds; ++round) {
    LiveRound lr;
    lr.round = round;

    auto reject = [&](TxRejectReason reason) {
      ++lr.admission_rejected;
      ++live.admission_rejected_by_reason[reason];
    };

    // ---- inject this round's scripted orders ----
    RoundBook book;
    for (; script_pos < config.script.size() && config.script[script_pos].round == round;
         ++script_pos) {
      const ScriptedOrder& scripted = config.script[script_pos];
      OrderData order = scripted.order;
      apply_jitter(order, scripted.jitter_pct, rng);
      set_book_seq(order, book_seq++);
      const Address& owner = order_owner(order);
      const Transaction tx{owner, seqs.take(owner), DataPostPayload{order}};
      const TxRejectReason verdict = net.submit_transaction(tx);
      if (verdict != TxRejectReason::None) {
        reject(verdict);
        continue;
      }
      book.add(order);
    }
    for (const NetworkConstraint& c : book.constraints) {
      active_constraints.push_back(c);
    }

    // ---- clear the four segments in use-case order ----
    FlowSchedule schedule(grid.loaded() ? grid.edges().size() : 0);

    ClearingResult uc1;
    if (config.feasibility_on_p2p && grid.loaded()) {
      uc1 = clear_inter_microgrid(book.p2p_offers, book.p2p_bids, grid, schedule,
                                  active_constraints, config.round_minutes,
                                  UseCase::PeerToPeer);
    } else {
      uc1 = clear_double_auction(book.p2p_offers, book.p2p_bids, UseCase::PeerToPeer);
    }

    ClearingResult uc2;
    if (!book.mg_offers.empty() || !book.mg_bids.empty()) {
      uc2 = clear_inter_microgrid(book.mg_offers, book.mg_bids, grid, schedule,
                                  active_constraints, config.round_minutes);
    }

    // Requirements drain a shared offer pool in submission order.
    ClearingResult uc3;
    uc3.use_case = UseCase::AncillaryDso;
    {
      std::vector<AncillaryOffer> pool = book.ancillary_offers;
      for (const AncillaryRequirement& req : book.ancillary_requirements) {
        ClearingResult part = clear_ancillary(req, pool, config.ledger.dso);
        uc3.fills.insert(uc3.fills.end(), part.fills.begin(), part.fills.end());
        uc3.unmet_capacity_w += part.unmet_capacity_w;
        pool.clear();
        for (OrderData& left : part.unmatched) {
          if (auto* a = std::get_if<AncillaryOffer>(&left)) pool.push_back(std::move(*a));
        }
      }
      for (AncillaryOffer& a : pool) uc3.unmatched.emplace_back(std::move(a));
    }

    evse_book.insert(evse_book.end(), book.evse_offers.begin(), book.evse_offers.end());
    ev_book.insert(ev_book.end(), book.ev_bids.begin(), book.ev_bids.end());
    ClearingResult uc4 = match_ev_sessions(evse_book, ev_book, round, config.round_minutes);
    evse_book.clear();
    ev_book.clear();
    for (const OrderData& left : uc4.unmatched) {
      if (const auto* e = std::get_if<EvseOffer>(&left)) {
        if (e->window.last > round) evse_book.push_back(*e);
      } else if (const auto* v = std::get_if<EvBid>(&left)) {
        if (v->window.last > round) ev_book.push_back(*v);
      }
    }

    // ---- settle and submit ----
    for (const ClearingResult* result : {&uc1, &uc2, &uc3, &uc4}) {
      for (const Transaction& tx :
           settle(*result, seqs, next_fill_id, config.ledger.reward_per_trade)) {
        const TxRejectReason verdict = net.submit_transaction(tx);
        if (verdict != TxRejectReason::None) reject(verdict);
      }
    }

    // ---- one consensus round ----
    const ProposalOutcome outcome = net.run_round(round);
    lr.proposer = outcome.proposer;
    lr.finalized = outcome.finalized;
    lr.votes_for = outcome.votes_for;
    lr.votes_against = outcome.votes_against;
    lr.fork_event = outcome.fork_event;
    for (const auto& [reason, n] : outcome.assembly_rejections) {
      live.assembly_rejected_by_reason[reason] += n;
      lr.assembly_rejected += n;
    }
    if (!outcome.finalized) ++live.rounds_unfinalized;
    if (outcome.fork_event) ++fork_events;
    live.rounds.push_back(lr);
  }

  RunResult result;
  for (const auto& [id, node] : net.nodes()) {
    live.replica_tips[id] = node.replica.tip_hash();
    result.replicas.emplace(id, node.replica);
  }

  result.chain = net.honest_node().replica;
  result.metrics = derive_metrics(result.chain, permissions, config.ledger);
  result.metrics.fork_events = fork_events;
  if (net.forked()) result.metrics.first_fork_round = net.first_fork_round();
  result.final_token = net.honest_node().state.token();
  result.live = std::move(live);
  return result;
}

PermissionTable infer_permissions(const Chain& chain, LedgerConfig& config) {
  PermissionTable permissions;
  bool dso_found = false;
  for (const Block& block : chain.blocks()) {
    for (const Transaction& tx : block.transactions) {
      const auto* post = std::get_if<DataPostPayload>(&tx.payload);
      if (post == nullptr) continue;
      permissions.grant(ActionKind::PostOffer, tx.sender);
      permissions.grant(ActionKind::PostBid, tx.sender);
      const bool dso_shaped = std::holds_alternative<NetworkConstraint>(post->order) ||
                              std::holds_alternative<AncillaryRequirement>(post->order);
      if (dso_shaped) {
        permissions.grant(ActionKind::PostConstraint, tx.sender);
        if (!dso_found) {
          config.dso = tx.sender;
          dso_found = true;
        }
      }
    }
  }
  return permissions;
}

}  // namespace xrg
