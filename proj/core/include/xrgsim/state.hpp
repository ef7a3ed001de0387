#pragma once

#include <cstdint>
#include <set>
#include <string_view>
#include <utility>

#include "xrgsim/address.hpp"
#include "xrgsim/amounts.hpp"
#include "xrgsim/permissions.hpp"
#include "xrgsim/token.hpp"
#include "xrgsim/tx.hpp"

namespace xrg {

/// Why a transaction failed to apply.  Shared by mempool admission, block
/// assembly, vote-time validation, and replay, so every path rejects the
/// same transactions for the same reasons.
enum class TxRejectReason : std::uint8_t {
  None = 0,
  PermissionDenied,
  NotStaked,
  DuplicateSeq,
  NegativeAmount,
  InsufficientBalance,
  InsufficientAllowance,
  InsufficientStake,
  VoidedSettlement,
};

std::string_view to_string(TxRejectReason reason);

/// How participation rewards are funded.  Mint inflates supply per reward;
/// Treasury pays rewards out of the system address's balance (a reward sent
/// to the system address itself still mints, which is how the pool is
/// seeded at genesis).
enum class RewardPolicy : std::uint8_t { Mint, Treasury };

struct LedgerConfig {
  Amount min_stake = 10 * kUnitsPerXrg;
  Amount reward_per_trade = kUnitsPerXrg / 100;
  RewardPolicy reward_policy = RewardPolicy::Mint;
  /// The distribution-system operator, if the scenario declares one.
  /// Empty address means no DSO-gated actions can be admitted.
  Address dso;

  bool operator==(const LedgerConfig&) const = default;
};

/// Everything a replica derives from applied transactions: token state,
/// consumed (sender, seq) pairs, and settlement fill ids voided by a failed
/// payment.  apply() either fully applies a transaction or leaves the state
/// untouched and reports why.
class LedgerState {
 public:
  LedgerState() = default;
  LedgerState(PermissionTable permissions, LedgerConfig config)
      : permissions_(std::move(permissions)), config_(std::move(config)) {}

  /// Apply one transaction, mutating on success only.  A failed token
  /// transfer that carries a fill id additionally voids that fill, so the
  /// paired settlement record can never apply afterwards.
  TxRejectReason apply(const Transaction& tx);

  /// The checks a node runs before letting a transaction into its mempool:
  /// permission for the action kind, market access for order posts, and
  /// sequence freshness against applied state.  Read-only.
  TxRejectReason admission_check(const Transaction& tx) const;

  const TokenState& token() const { return token_; }
  const PermissionTable& permissions() const { return permissions_; }
  const LedgerConfig& config() const { return config_; }

  bool seq_used(const Address& sender, std::uint64_t seq) const {
    return used_seqs_.count({sender, seq}) > 0;
  }
  const std::set<std::uint64_t>& voided_fills() const { return voided_fills_; }

  bool operator==(const LedgerState&) const = default;

 private:
  TxRejectReason check_payload(const Transaction& tx) const;

  PermissionTable permissions_;
  LedgerConfig config_;
  TokenState token_;
  std::set<std::pair<Address, std::uint64_t>> used_seqs_;
  std::set<std::uint64_t> voided_fills_;
};

}  // namespace xrg
