#include "xrgsim/market.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace xrg {
namespace {

using i128 = __int128;

// A bid's implied maximum unit price is budget / quantity expressed in units
// per kWh, i.e. the rational (1000 * budget) / quantity_wh.  All comparisons
// against it cross-multiply in 128-bit space; nothing is ever divided until a
// final floor is taken, so ordering is exact.

bool ask_within_bid(Price ask, const Bid& bid) {
  return i128(ask) * bid.quantity_wh <= i128(bid.budget) * 1000;
}

// max(x) > max(y)?  The factor of 1000 cancels, keeping the products within
// two 64-bit operands.
bool bid_max_greater(const Bid& x, const Bid& y) {
  return i128(x.budget) * y.quantity_wh > i128(y.budget) * x.quantity_wh;
}

bool bid_max_equal(const Bid& x, const Bid& y) {
  return i128(x.budget) * y.quantity_wh == i128(y.budget) * x.quantity_wh;
}

// Floor of the midpoint between the last matched ask and the last matched
// bid's implied maximum: floor((ask * qty + 1000 * budget) / (2 * qty)).
Price midpoint_price(Price last_ask, const Bid& last_bid) {
  const i128 num = i128(last_ask) * last_bid.quantity_wh +
                   i128(1000) * last_bid.budget;
  const i128 den = i128(2) * last_bid.quantity_wh;
  return static_cast<Price>(num / den);
}

// One matched (offer, bid) pair before pricing, indexed into the caller's
// original order arrays so residuals can be booked back.
struct RawFill {
  std::size_t offer_idx = 0;
  std::size_t bid_idx = 0;
  WattHours quantity = 0;
};

struct AuctionWalk {
  std::vector<RawFill> raw;
  std::vector<WattHours> offer_rem;  // residual quantity per original offer
  std::vector<WattHours> bid_rem;    // residual quantity per original bid
  bool priced = false;
  Price clearing_price = 0;
};

// The greedy double-auction walk: cheapest asks against richest bids until
// the marginal pair no longer overlaps.  Among all allocations this maximises
// total surplus, and among those the traded quantity, so the outcome is the
// canonical competitive one.
AuctionWalk run_auction(std::span<const Offer> offers, std::span<const Bid> bids) {
  AuctionWalk walk;
  walk.offer_rem.reserve(offers.size());
  for (const Offer& o : offers) walk.offer_rem.push_back(o.quantity_wh);
  walk.bid_rem.reserve(bids.size());
  for (const Bid& b : bids) walk.bid_rem.push_back(b.quantity_wh);

  std::vector<std::size_t> ask_order(offers.size());
  std::iota(ask_order.begin(), ask_order.end(), 0);
  std::sort(ask_order.begin(), ask_order.end(), [&](std::size_t l, std::size_t r) {
    const Offer& a = offers[l];
    const Offer& b = offers[r];
    if (a.unit_price != b.unit_price) return a.unit_price < b.unit_price;
    if (a.seq != b.seq) return a.seq < b.seq;
    return a.seller.value < b.seller.value;
  });

  std::vector<std::size_t> bid_order(bids.size());
  std::iota(bid_order.begin(), bid_order.end(), 0);
  std::sort(bid_order.begin(), bid_order.end(), [&](std::size_t l, std::size_t r) {
    const Bid& a = bids[l];
    const Bid& b = bids[r];
    if (!bid_max_equal(a, b)) return bid_max_greater(a, b);
    if (a.seq != b.seq) return a.seq < b.seq;
    return a.buyer.value < b.buyer.value;
  });

  std::size_t oi = 0;
  std::size_t bi = 0;
  Price last_ask = 0;
  std::size_t last_bid = bids.size();
  while (oi < ask_order.size() && bi < bid_order.size()) {
    const std::size_t o = ask_order[oi];
    const std::size_t b = bid_order[bi];
    if (walk.offer_rem[o] == 0 || offers[o].quantity_wh <= 0) {
      ++oi;
      continue;
    }
    if (walk.bid_rem[b] == 0 || bids[b].quantity_wh <= 0) {
      ++bi;
      continue;
    }
    // Books are price-sorted, so the first non-overlapping marginal pair
    // means no later pair can overlap either.
    if (!ask_within_bid(offers[o].unit_price, bids[b])) break;
    const WattHours q = std::min(walk.offer_rem[o], walk.bid_rem[b]);
    walk.raw.push_back({o, b, q});
    walk.offer_rem[o] -= q;
    walk.bid_rem[b] -= q;
    last_ask = offers[o].unit_price;
    last_bid = b;
  }

  if (!walk.raw.empty()) {
    walk.priced = true;
    walk.clearing_price = midpoint_price(last_ask, bids[last_bid]);
  }
  return walk;
}

// Prices the walk's fills at the uniform clearing price and rebuilds the
// residual order book.  Residual bids keep whatever budget they did not
// spend, so reports stay self-consistent.
ClearingResult finish_auction(std::span<const Offer> offers,
                              std::span<const Bid> bids,
                              const AuctionWalk& walk,
                              UseCase use_case) {
  ClearingResult result;
  result.use_case = use_case;
  result.has_clearing_price = walk.priced;
  result.clearing_price = walk.clearing_price;

  std::vector<Amount> spent(bids.size(), 0);
  for (const RawFill& rf : walk.raw) {
    if (rf.quantity <= 0) continue;
    Fill fill;
    fill.seller = offers[rf.offer_idx].seller;
    fill.buyer = bids[rf.bid_idx].buyer;
    fill.quantity = rf.quantity;
    fill.unit_price = walk.clearing_price;
    fill.payment = energy_cost(rf.quantity, walk.clearing_price);
    spent[rf.bid_idx] += fill.payment;
    result.fills.push_back(fill);
  }

  for (std::size_t i = 0; i < offers.size(); ++i) {
    if (walk.offer_rem[i] <= 0) continue;
    Offer rest = offers[i];
    rest.quantity_wh = walk.offer_rem[i];
    result.unmatched.push_back(rest);
  }
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (walk.bid_rem[i] <= 0) continue;
    Bid rest = bids[i];
    rest.quantity_wh = walk.bid_rem[i];
    rest.budget = bids[i].budget - spent[i];
    result.unmatched.push_back(rest);
  }
  return result;
}

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  return (num + den - 1) / den;
}

}  // namespace

Price implied_max_price_floor(const Bid& bid) {
  if (bid.quantity_wh <= 0) return 0;
  return static_cast<Price>(i128(bid.budget) * 1000 / bid.quantity_wh);
}

ClearingResult clear_double_auction(std::span<const Offer> offers,
                                    std::span<const Bid> bids,
                                    UseCase use_case) {
  const AuctionWalk walk = run_auction(offers, bids);
  return finish_auction(offers, bids, walk, use_case);
}

ClearingResult clear_inter_microgrid(std::span<const Offer> offers,
                                     std::span<const Bid> bids,
                                     const FeederGraph& grid,
                                     FlowSchedule& schedule,
                                     std::span<const NetworkConstraint> dso_constraints,
                                     std::uint64_t round_minutes,
                                     UseCase use_case) {
  if (!grid.loaded()) {
    throw GridUnavailableError("inter-microgrid clearing requires a feeder graph");
  }
  FeederGraph constrained = grid;
  for (const NetworkConstraint& c : dso_constraints) {
    constrained.set_capacity(c.node_a, c.node_b, c.capacity_w);
  }

  AuctionWalk walk = run_auction(offers, bids);
  const std::int64_t rm = static_cast<std::int64_t>(round_minutes);

  // Clip each fill, in fill order, to the residual feeder capacity along the
  // seller->buyer path.  Clipped energy goes back to both residuals.
  std::vector<RawFill> kept;
  kept.reserve(walk.raw.size());
  for (const RawFill& rf : walk.raw) {
    const Address& seller = offers[rf.offer_idx].seller;
    const Address& buyer = bids[rf.bid_idx].buyer;
    const std::string from = constrained.location_of(seller);
    const std::string to = constrained.location_of(buyer);

    WattHours granted_wh = rf.quantity;
    if (!from.empty() && !to.empty() && from != to) {
      // Demand in watts rounds up so no energy is hidden from the check;
      // the grant converts back down and is clamped to the fill.
      const Watts want_w = ceil_div(rf.quantity * 60, rm);
      const FeasibilityResult feas =
          check_feasibility(constrained, schedule, from, to, want_w);
      granted_wh = std::min<WattHours>(rf.quantity, feas.granted_w * rm / 60);
    }

    const WattHours clipped = rf.quantity - granted_wh;
    if (clipped > 0) {
      walk.offer_rem[rf.offer_idx] += clipped;
      walk.bid_rem[rf.bid_idx] += clipped;
    }
    if (granted_wh > 0) {
      RawFill adjusted = rf;
      adjusted.quantity = granted_wh;
      kept.push_back(adjusted);
    }
  }
  walk.raw = std::move(kept);

  return finish_auction(offers, bids, walk, use_case);
}

ClearingResult clear_ancillary(const AncillaryRequirement& requirement,
                               std::span<const AncillaryOffer> offers,
                               const Address& dso) {
  if (requirement.poster != dso) {
    throw PermissionDeniedError("ancillary requirements may only be posted by the DSO");
  }

  ClearingResult result;
  result.use_case = UseCase::AncillaryDso;

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < offers.size(); ++i) {
    if (offers[i].service == requirement.service && offers[i].capacity_w > 0) {
      order.push_back(i);
    }
  }
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    const AncillaryOffer& a = offers[l];
    const AncillaryOffer& b = offers[r];
    if (a.unit_price != b.unit_price) return a.unit_price < b.unit_price;
    if (a.seq != b.seq) return a.seq < b.seq;
    return a.provider.value < b.provider.value;
  });

  std::vector<Watts> used(offers.size(), 0);
  Watts need = requirement.capacity_w;
  Amount budget = requirement.budget;
  for (const std::size_t i : order) {
    if (need <= 0 || budget <= 0) break;
    const AncillaryOffer& offer = offers[i];
    Watts take = std::min(offer.capacity_w, need);
    if (offer.unit_price > 0) {
      // Largest capacity the remaining budget can pay for at this price
      // (prices are per kW, capacities in W).
      const Watts affordable =
          static_cast<Watts>(i128(budget) * 1000 / offer.unit_price);
      take = std::min(take, affordable);
    }
    if (take <= 0) continue;
    const Amount cost = capacity_cost(take, offer.unit_price);

    Fill fill;
    fill.seller = offer.provider;
    fill.buyer = requirement.poster;
    fill.quantity = take;  // watts for ancillary fills
    fill.unit_price = offer.unit_price;
    fill.payment = cost;
    result.fills.push_back(fill);

    used[i] = take;
    need -= take;
    budget -= cost;
  }

  result.unmet_capacity_w = need;
  for (std::size_t i = 0; i < offers.size(); ++i) {
    const Watts rest = offers[i].capacity_w - used[i];
    if (rest <= 0) continue;
    AncillaryOffer residual = offers[i];
    residual.capacity_w = rest;
    result.unmatched.push_back(residual);
  }
  return result;
}

ClearingResult match_ev_sessions(std::span<const EvseOffer> evse_offers,
                                 std::span<const EvBid> ev_bids,
                                 std::uint64_t current_round,
                                 std::uint64_t round_minutes) {
  ClearingResult result;
  result.use_case = UseCase::EvCharging;
  const std::int64_t rm = static_cast<std::int64_t>(round_minutes);

  // Richest implied price (budget / demand) first, ties by arrival.
  std::vector<std::size_t> bid_order;
  for (std::size_t i = 0; i < ev_bids.size(); ++i) {
    if (ev_bids[i].demand_wh > 0) bid_order.push_back(i);
  }
  std::sort(bid_order.begin(), bid_order.end(), [&](std::size_t l, std::size_t r) {
    const EvBid& a = ev_bids[l];
    const EvBid& b = ev_bids[r];
    const i128 lhs = i128(a.budget) * b.demand_wh;
    const i128 rhs = i128(b.budget) * a.demand_wh;
    if (lhs != rhs) return lhs > rhs;
    if (a.seq != b.seq) return a.seq < b.seq;
    return a.vehicle.value < b.vehicle.value;
  });

  std::vector<bool> consumed(evse_offers.size(), false);
  std::vector<bool> served(ev_bids.size(), false);

  for (const std::size_t bi : bid_order) {
    const EvBid& bid = ev_bids[bi];

    // Cheapest station that can still deliver a positive session.
    std::size_t best = evse_offers.size();
    WattHours best_energy = 0;
    for (std::size_t si = 0; si < evse_offers.size(); ++si) {
      if (consumed[si]) continue;
      const EvseOffer& evse = evse_offers[si];
      const std::uint64_t overlap =
          bid.window.overlap_from(evse.window, current_round);
      if (overlap == 0) continue;

      const WattHours deliverable =
          evse.max_power_w * static_cast<std::int64_t>(overlap) * rm / 60;
      WattHours energy = std::min(bid.demand_wh, deliverable);
      if (evse.unit_price > 0) {
        const WattHours affordable =
            static_cast<WattHours>(i128(bid.budget) * 1000 / evse.unit_price);
        energy = std::min(energy, affordable);
      }
      if (energy <= 0) continue;

      const bool better =
          best == evse_offers.size() ||
          evse.unit_price < evse_offers[best].unit_price ||
          (evse.unit_price == evse_offers[best].unit_price &&
           (evse.seq < evse_offers[best].seq ||
            (evse.seq == evse_offers[best].seq &&
             evse.station.value < evse_offers[best].station.value)));
      if (better) {
        best = si;
        best_energy = energy;
      }
    }
    if (best == evse_offers.size()) continue;

    const EvseOffer& evse = evse_offers[best];
    Fill fill;
    fill.seller = evse.station;
    fill.buyer = bid.vehicle;
    fill.quantity = best_energy;
    fill.unit_price = evse.unit_price;
    fill.payment = energy_cost(best_energy, evse.unit_price);
    result.fills.push_back(fill);
    consumed[best] = true;
    served[bi] = true;
  }

  for (std::size_t si = 0; si < evse_offers.size(); ++si) {
    if (!consumed[si]) result.unmatched.push_back(evse_offers[si]);
  }
  for (std::size_t bi = 0; bi < ev_bids.size(); ++bi) {
    if (!served[bi]) result.unmatched.push_back(ev_bids[bi]);
  }
  return result;
}

std::vector<Transaction> settle(const ClearingResult& result,
                                SeqAllocator& seqs,
                                std::uint64_t& next_fill_id,
                                Amount reward_per_trade) {
  std::vector<Transaction> txs;
  txs.reserve(result.fills.size() * 4);
  const Address& system = system_address();

  for (const Fill& fill : result.fills) {
    const std::uint64_t fill_id = next_fill_id++;

    // Payment precedes the settlement record: if the transfer cannot apply,
    // the record that cites the same fill id must not apply either.
    Transaction transfer;
    transfer.sender = fill.buyer;
    transfer.seq = seqs.take(fill.buyer);
    transfer.payload = TokenTransferPayload{fill.seller, fill.payment, fill_id};
    txs.push_back(std::move(transfer));

    Transaction record;
    record.sender = system;
    record.seq = seqs.take(system);
    record.payload = TradeSettlementPayload{result.use_case, fill.seller,
                                            fill.buyer,      fill.quantity,
                                            fill.unit_price, fill.payment,
                                            fill_id};
    txs.push_back(std::move(record));

    for (const Address& party : {fill.seller, fill.buyer}) {
      Transaction reward;
      reward.sender = system;
      reward.seq = seqs.take(system);
      reward.payload = RewardPayload{party, reward_per_trade};
      txs.push_back(std::move(reward));
    }
  }
  return txs;
}

}  // namespace xrg
