#include "xrgsim/state.hpp"

#include <variant>

namespace xrg {
namespace {

TxRejectReason from_token_error(TokenError err) {
  switch (err) {
    case TokenError::None: return TxRejectReason::None;
    case TokenError::NegativeAmount: return TxRejectReason::NegativeAmount;
    case TokenError::InsufficientBalance: return TxRejectReason::InsufficientBalance;
    case TokenError::InsufficientAllowance: return TxRejectReason::InsufficientAllowance;
    case TokenError::InsufficientStake: return TxRejectReason::InsufficientStake;
  }
  return TxRejectReason::None;
}

// What posting a given order requires: which table entry, which address must
// match the sender, whether the order type is reserved to the DSO, and
// whether any of its numbers are negative.
struct OrderGate {
  ActionKind kind = ActionKind::PostOffer;
  const Address* owner = nullptr;
  bool dso_only = false;
  bool negative = false;
};

OrderGate inspect_order(const OrderData& order) {
  struct Visitor {
    OrderGate operator()(const Offer& o) const {
      return {ActionKind::PostOffer, &o.seller, false,
              o.quantity_wh < 0 || o.unit_price < 0};
    }
    OrderGate operator()(const Bid& b) const {
      return {ActionKind::PostBid, &b.buyer, false,
              b.quantity_wh < 0 || b.budget < 0};
    }
    OrderGate operator()(const AncillaryOffer& o) const {
      return {ActionKind::PostOffer, &o.provider, false,
              o.capacity_w < 0 || o.unit_price < 0};
    }
    OrderGate operator()(const AncillaryRequirement& r) const {
      return {ActionKind::PostBid, &r.poster, true,
              r.capacity_w < 0 || r.budget < 0};
    }
    OrderGate operator()(const EvseOffer& o) const {
      return {ActionKind::PostOffer, &o.station, false,
              o.max_power_w < 0 || o.unit_price < 0};
    }
    OrderGate operator()(const EvBid& b) const {
      return {ActionKind::PostBid, &b.vehicle, false,
              b.demand_wh < 0 || b.budget < 0};
    }
    OrderGate operator()(const NetworkConstraint& c) const {
      return {ActionKind::PostConstraint, &c.poster, true, c.capacity_w < 0};
    }
  };
  return std::visit(Visitor{}, order);
}

}  // namespace

std::string_view to_string(TxRejectReason reason) {
  switch (reason) {
    case TxRejectReason::None: return "none";
    case TxRejectReason::PermissionDenied: return "permission_denied";
    case TxRejectReason::NotStaked: return "not_staked";
    case TxRejectReason::DuplicateSeq: return "duplicate_seq";
    case TxRejectReason::NegativeAmount: return "negative_amount";
    case TxRejectReason::InsufficientBalance: return "insufficient_balance";
    case TxRejectReason::InsufficientAllowance: return "insufficient_allowance";
    case TxRejectReason::InsufficientStake: return "insufficient_stake";
    case TxRejectReason::VoidedSettlement: return "voided_settlement";
  }
  return "unknown";
}

// Structural rules that hold regardless of balances: amount signs, who may
// post what, and system-only transaction kinds.  Both mempool admission and
// application run these; application layers the token guards on top.
TxRejectReason LedgerState::check_payload(const Transaction& tx) const {
  if (const auto* post = std::get_if<DataPostPayload>(&tx.payload)) {
    const OrderGate gate = inspect_order(post->order);
    if (gate.negative) return TxRejectReason::NegativeAmount;
    // Orders name their own party; nobody posts on another's behalf.
    if (*gate.owner != tx.sender) return TxRejectReason::PermissionDenied;
    if (!permissions_.allowed(gate.kind, tx.sender)) {
      return TxRejectReason::PermissionDenied;
    }
    if (gate.dso_only && tx.sender != config_.dso) {
      return TxRejectReason::PermissionDenied;
    }
    const bool market_action =
        gate.kind == ActionKind::PostOffer || gate.kind == ActionKind::PostBid;
    if (market_action && !token_.has_market_access(tx.sender, config_.min_stake)) {
      return TxRejectReason::NotStaked;
    }
    return TxRejectReason::None;
  }
  if (const auto* rec = std::get_if<TradeSettlementPayload>(&tx.payload)) {
    if (rec->quantity < 0 || rec->unit_price < 0 || rec->payment < 0) {
      return TxRejectReason::NegativeAmount;
    }
    if (tx.sender != system_address()) return TxRejectReason::PermissionDenied;
    return TxRejectReason::None;
  }
  if (const auto* transfer = std::get_if<TokenTransferPayload>(&tx.payload)) {
    if (transfer->amount < 0) return TxRejectReason::NegativeAmount;
    return TxRejectReason::None;
  }
  if (const auto* approve = std::get_if<TokenApprovePayload>(&tx.payload)) {
    if (approve->amount < 0) return TxRejectReason::NegativeAmount;
    return TxRejectReason::None;
  }
  if (const auto* stake = std::get_if<StakePayload>(&tx.payload)) {
    if (stake->amount < 0) return TxRejectReason::NegativeAmount;
    return TxRejectReason::None;
  }
  if (const auto* unstake = std::get_if<UnstakePayload>(&tx.payload)) {
    if (unstake->amount < 0) return TxRejectReason::NegativeAmount;
    return TxRejectReason::None;
  }
  const auto& reward = std::get<RewardPayload>(tx.payload);
  if (reward.amount < 0) return TxRejectReason::NegativeAmount;
  if (tx.sender != system_address()) return TxRejectReason::PermissionDenied;
  return TxRejectReason::None;
}

TxRejectReason LedgerState::admission_check(const Transaction& tx) const {
  if (seq_used(tx.sender, tx.seq)) return TxRejectReason::DuplicateSeq;
  return check_payload(tx);
}

TxRejectReason LedgerState::apply(const Transaction& tx) {
  if (seq_used(tx.sender, tx.seq)) return TxRejectReason::DuplicateSeq;

  TxRejectReason verdict = check_payload(tx);
  if (verdict == TxRejectReason::None) {
    if (const auto* rec = std::get_if<TradeSettlementPayload>(&tx.payload)) {
      if (voided_fills_.count(rec->fill_id) > 0) {
        verdict = TxRejectReason::VoidedSettlement;
      }
    } else if (const auto* t = std::get_if<TokenTransferPayload>(&tx.payload)) {
      verdict = from_token_error(token_.transfer(tx.sender, t->to, t->amount));
    } else if (const auto* a = std::get_if<TokenApprovePayload>(&tx.payload)) {
      verdict = from_token_error(token_.approve(tx.sender, a->spender, a->amount));
    } else if (const auto* s = std::get_if<StakePayload>(&tx.payload)) {
      verdict = from_token_error(token_.stake(tx.sender, s->amount));
    } else if (const auto* u = std::get_if<UnstakePayload>(&tx.payload)) {
      verdict = from_token_error(token_.unstake(tx.sender, u->amount));
    } else if (const auto* r = std::get_if<RewardPayload>(&tx.payload)) {
      if (config_.reward_policy == RewardPolicy::Mint || r->to == system_address()) {
        token_.mint_reward(r->to, r->amount);
      } else {
        verdict = from_token_error(
            token_.transfer(system_address(), r->to, r->amount));
      }
    }
    // DataPost has no ledger-side effect beyond sequence bookkeeping; the
    // order book lives with the market engine.
  }

  if (verdict != TxRejectReason::None) {
    // A payment that cannot apply poisons its settlement record.
    if (const auto* t = std::get_if<TokenTransferPayload>(&tx.payload)) {
      if (t->fill_id != 0) voided_fills_.insert(t->fill_id);
    }
    return verdict;
  }
  used_seqs_.insert({tx.sender, tx.seq});
  return TxRejectReason::None;
}

}  // namespace xrg
