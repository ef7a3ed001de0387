#include "xrgsim/token.hpp"

namespace xrg {

const char* to_string(TokenError e) {
  switch (e) {
    case TokenError::None: return "none";
    case TokenError::NegativeAmount: return "negative_amount";
    case TokenError::InsufficientBalance: return "insufficient_balance";
    case TokenError::InsufficientAllowance: return "insufficient_allowance";
    case TokenError::InsufficientStake: return "insufficient_stake";
  }
  return "unknown";
}

Amount TokenState::balance_of(const Address& who) const {
  auto it = balances_.find(who);
  return it == balances_.end() ? 0 : it->second;
}

Amount TokenState::stake_of(const Address& who) const {
  auto it = stakes_.find(who);
  return it == stakes_.end() ? 0 : it->second;
}

Amount TokenState::allowance(const Address& owner, const Address& spender) const {
  auto it = allowances_.find({owner, spender});
  return it == allowances_.end() ? 0 : it->second;
}

void TokenState::credit(std::map<Address, Amount>& table, const Address& who, Amount amount) {
  auto [it, _] = table.try_emplace(who, 0);
  it->second += amount;
  if (it->second == 0) table.erase(it);  // keep snapshots free of zero rows
}

TokenError TokenState::transfer(const Address& from, const Address& to, Amount amount) {
  if (amount < 0) return TokenError::NegativeAmount;
  if (balance_of(from) < amount) return TokenError::InsufficientBalance;
  credit(balances_, from, -amount);
  credit(balances_, to, amount);
  return TokenError::None;
}

TokenError TokenState::approve(const Address& owner, const Address& spender, Amount amount) {
  if (amount < 0) return TokenError::NegativeAmount;
  if (amount == 0) {
    allowances_.erase({owner, spender});
  } else {
    allowances_[{owner, spender}] = amount;
  }
  return TokenError::None;
}

TokenError TokenState::transfer_from(const Address& spender, const Address& owner,
                                     const Address& to, Amount amount) {
  if (amount < 0) return TokenError::NegativeAmount;
  if (allowance(owner, spender) < amount) return TokenError::InsufficientAllowance;
  if (balance_of(owner) < amount) return TokenError::InsufficientBalance;
  credit(balances_, owner, -amount);
  credit(balances_, to, amount);
  auto it = allowances_.find({owner, spender});
  it->second -= amount;
  if (it->second == 0) allowances_.erase(it);
  return TokenError::None;
}

TokenError TokenState::stake(const Address& who, Amount amount) {
  if (amount < 0) return TokenError::NegativeAmount;
  if (balance_of(who) < amount) return TokenError::InsufficientBalance;
  credit(balances_, who, -amount);
  credit(stakes_, who, amount);
  return TokenError::None;
}

TokenError TokenState::unstake(const Address& who, Amount amount) {
  if (amount < 0) return TokenError::NegativeAmount;
  if (stake_of(who) < amount) return TokenError::InsufficientStake;
  credit(stakes_, who, -amount);
  credit(balances_, who, amount);
  return TokenError::None;
}

TokenError TokenState::mint_reward(const Address& to, Amount amount) {
  if (amount < 0) return TokenError::NegativeAmount;
  credit(balances_, to, amount);
  total_supply_ += amount;
  return TokenError::None;
}

Amount TokenState::circulating_total() const {
  Amount total = 0;
  for (const auto& [_, v] : balances_) total += v;
  for (const auto& [_, v] : stakes_) total += v;
  return total;
}

}  // namespace xrg
