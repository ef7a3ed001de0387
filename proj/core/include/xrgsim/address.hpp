#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace xrg {

/// Pseudonymous participant identity: 32 lowercase hex characters,
/// derived from a registration name (first 16 bytes of its SHA-256).
struct Address {
  std::string value;

  Address() = default;
  explicit Address(std::string v) : value(std::move(v)) {}

  auto operator<=>(const Address&) const = default;

  bool valid() const;
};

Address derive_address(std::string_view registration_name);

/// Reserved address used as sender of protocol-emitted transactions
/// (genesis allocation, trade settlements, participation rewards).
const Address& system_address();

/// Registration name reserved for the protocol; scenario participants
/// may not use it.
inline constexpr std::string_view kSystemName = "system";

}  // namespace xrg
