#pragma once

#include "xrgsim/address.hpp"
#include "xrgsim/amounts.hpp"

#include <map>
#include <utility>

namespace xrg {

enum class TokenError {
  None = 0,
  NegativeAmount,
  InsufficientBalance,
  InsufficientAllowance,
  InsufficientStake,
};

const char* to_string(TokenError e);

/// XRG balances, ERC20-style allowances, and marketplace stakes.
///
/// Every mutating operation checks its guards before touching state, so a
/// failed call leaves the state exactly as it was. Conservation invariant:
/// sum(balances) + sum(stakes) == total_supply after every operation; only
/// mint_reward moves total_supply.
class TokenState {
 public:
  Amount total_supply() const { return total_supply_; }
  Amount balance_of(const Address& who) const;
  Amount stake_of(const Address& who) const;
  Amount allowance(const Address& owner, const Address& spender) const;

  TokenError transfer(const Address& from, const Address& to, Amount amount);
  /// ERC20 semantics: a repeated approve overwrites the prior allowance.
  TokenError approve(const Address& owner, const Address& spender, Amount amount);
  TokenError transfer_from(const Address& spender, const Address& owner, const Address& to,
                           Amount amount);
  TokenError stake(const Address& who, Amount amount);
  TokenError unstake(const Address& who, Amount amount);
  TokenError mint_reward(const Address& to, Amount amount);

  bool has_market_access(const Address& who, Amount min_stake) const {
    return stake_of(who) >= min_stake;
  }

  /// sum(balances) + sum(stakes); equals total_supply by invariant.
  Amount circulating_total() const;

  const std::map<Address, Amount>& balances() const { return balances_; }
  const std::map<Address, Amount>& stakes() const { return stakes_; }
  const std::map<std::pair<Address, Address>, Amount>& allowances() const { return allowances_; }

  bool operator==(const TokenState&) const = default;

 private:
  void credit(std::map<Address, Amount>& table, const Address& who, Amount amount);

  std::map<Address, Amount> balances_;
  std::map<Address, Amount> stakes_;
  std::map<std::pair<Address, Address>, Amount> allowances_;
  Amount total_supply_ = 0;
};

}  // namespace xrg
