#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "xrgsim/address.hpp"
#include "xrgsim/amounts.hpp"
#include "xrgsim/grid.hpp"
#include "xrgsim/orders.hpp"
#include "xrgsim/tx.hpp"

namespace xrg {

// Market clearing for the four transactive use cases.  All price logic is
// integer-exact: a bid's implied maximum price (budget / quantity) is kept as
// a rational and compared by cross-multiplication in 128-bit arithmetic, so
// two runs of the same book can never disagree by a rounding artifact.

struct GridUnavailableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PermissionDeniedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Highest unit price (units per kWh) a bid can pay without exceeding its
/// budget, rounded down.  Convenience for reporting; the clearing engine
/// itself compares the exact rational.
Price implied_max_price_floor(const Bid& bid);

/// Uniform-price double auction over one round's book.  Offers clear lowest
/// price first, bids highest implied price first; ties resolve by submission
/// order then address.  The clearing price is the floor midpoint of the last
/// matched ask and the last matched bid's implied maximum.
ClearingResult clear_double_auction(std::span<const Offer> offers,
                                    std::span<const Bid> bids,
                                    UseCase use_case);

/// Double auction followed by feeder feasibility: every fill is clipped to
/// the residual capacity along the seller->buyer path, in fill order, against
/// `schedule` (which accumulates granted flow and is shared across clearings
/// in the same round).  DSO constraints override edge capacities before any
/// clipping.  Clipped energy is returned to the unmatched residuals.
ClearingResult clear_inter_microgrid(std::span<const Offer> offers,
                                     std::span<const Bid> bids,
                                     const FeederGraph& grid,
                                     FlowSchedule& schedule,
                                     std::span<const NetworkConstraint> dso_constraints,
                                     std::uint64_t round_minutes,
                                     UseCase use_case = UseCase::InterMicrogrid);

/// Pay-as-bid procurement of one ancillary requirement.  Offers for the
/// matching service are accepted cheapest first until the capacity need is
/// met or the budget runs out; each accepted provider is paid its own price.
/// Throws PermissionDeniedError unless the requirement was posted by `dso`.
ClearingResult clear_ancillary(const AncillaryRequirement& requirement,
                               std::span<const AncillaryOffer> offers,
                               const Address& dso);

/// EV charging assignment for the current round.  Bids are served richest
/// implied price first; each picks the cheapest station whose availability
/// window still overlaps the bid's window from `current_round` on.  A station
/// serves at most one vehicle per window.  Unmatched orders are returned as
/// residuals so the caller can carry them into later rounds.
ClearingResult match_ev_sessions(std::span<const EvseOffer> evse_offers,
                                 std::span<const EvBid> ev_bids,
                                 std::uint64_t current_round,
                                 std::uint64_t round_minutes);

/// Hands out per-sender transaction sequence numbers from a shared counter
/// map, so settlement and order injection never collide.
class SeqAllocator {
 public:
  explicit SeqAllocator(std::map<Address, std::uint64_t>& next_seq)
      : next_seq_(next_seq) {}

  std::uint64_t take(const Address& sender) { return next_seq_[sender]++; }

 private:
  std::map<Address, std::uint64_t>& next_seq_;
};

/// Turns a clearing result into ledger transactions.  Per fill, in order:
/// the buyer's TokenTransfer to the seller, the system's TradeSettlement
/// record (sharing the transfer's fill id), then one Reward each for seller
/// and buyer.  `next_fill_id` advances by one per fill.
std::vector<Transaction> settle(const ClearingResult& result,
                                SeqAllocator& seqs,
                                std::uint64_t& next_fill_id,
                                Amount reward_per_trade);

}  // namespace xrg
