#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string_view>

#include "xrgsim/address.hpp"

namespace xrg {

/// Actions gated by the permission table.  Proposing and voting belong to
/// registered validators; posting orders to staked participants; posting
/// network constraints to the DSO alone.
enum class ActionKind : std::uint8_t {
  ProposeBlock = 1,
  Vote = 2,
  PostOffer = 3,
  PostBid = 4,
  PostConstraint = 5,
};

std::string_view to_string(ActionKind kind);

/// Which addresses may perform which actions.  Grant sets are ordered, so
/// anything iterating them (proposer rotation in particular) is
/// deterministic.
class PermissionTable {
 public:
  void grant(ActionKind kind, const Address& who) { grants_[kind].insert(who); }

  void revoke(ActionKind kind, const Address& who) {
    auto it = grants_.find(kind);
    if (it != grants_.end()) it->second.erase(who);
  }

  bool allowed(ActionKind kind, const Address& who) const {
    auto it = grants_.find(kind);
    return it != grants_.end() && it->second.count(who) > 0;
  }

  const std::set<Address>& holders(ActionKind kind) const {
    static const std::set<Address> empty;
    auto it = grants_.find(kind);
    return it == grants_.end() ? empty : it->second;
  }

  bool operator==(const PermissionTable&) const = default;

 private:
  std::map<ActionKind, std::set<Address>> grants_;
};

inline std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::ProposeBlock: return "propose_block";
    case ActionKind::Vote: return "vote";
    case ActionKind::PostOffer: return "post_offer";
    case ActionKind::PostBid: return "post_bid";
    case ActionKind::PostConstraint: return "post_constraint";
  }
  return "unknown";
}

}  // namespace xrg
