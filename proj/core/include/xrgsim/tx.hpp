#pragma once

#include "xrgsim/address.hpp"
#include "xrgsim/amounts.hpp"
#include "xrgsim/orders.hpp"

#include <compare>
#include <cstdint>
#include <variant>

namespace xrg {

enum class TxKind : std::uint8_t {
  DataPost = 1,
  TradeSettlement = 2,
  TokenTransfer = 3,
  TokenApprove = 4,
  Stake = 5,
  Unstake = 6,
  Reward = 7,
};

const char* to_string(TxKind kind);

struct DataPostPayload {
  OrderData order;
  auto operator<=>(const DataPostPayload&) const = default;
};

/// Durable record of a matched trade. Paired with the TokenTransfer
/// carrying the same fill_id; if that transfer is rejected at block
/// application the settlement is voided with it.
struct TradeSettlementPayload {
  UseCase use_case = UseCase::PeerToPeer;
  Address seller;
  Address buyer;
  std::int64_t quantity = 0;  // Wh, or W for ancillary capacity
  Price unit_price = 0;
  Amount payment = 0;
  std::uint64_t fill_id = 0;
  auto operator<=>(const TradeSettlementPayload&) const = default;
};

struct TokenTransferPayload {
  Address to;
  Amount amount = 0;
  std::uint64_t fill_id = 0;  // 0 for transfers not tied to a fill
  auto operator<=>(const TokenTransferPayload&) const = default;
};

struct TokenApprovePayload {
  Address spender;
  Amount amount = 0;
  auto operator<=>(const TokenApprovePayload&) const = default;
};

struct StakePayload {
  Amount amount = 0;
  auto operator<=>(const StakePayload&) const = default;
};

struct UnstakePayload {
  Amount amount = 0;
  auto operator<=>(const UnstakePayload&) const = default;
};

/// Participation reward, minted by the protocol. Only the system
/// address may emit these.
struct RewardPayload {
  Address to;
  Amount amount = 0;
  auto operator<=>(const RewardPayload&) const = default;
};

using TxPayload = std::variant<DataPostPayload, TradeSettlementPayload, TokenTransferPayload,
                               TokenApprovePayload, StakePayload, UnstakePayload, RewardPayload>;

struct Transaction {
  Address sender;
  std::uint64_t seq = 0;  // per-sender monotone counter
  TxPayload payload;

  TxKind kind() const { return static_cast<TxKind>(payload.index() + 1); }

  auto operator<=>(const Transaction&) const = default;
};

}  // namespace xrg
