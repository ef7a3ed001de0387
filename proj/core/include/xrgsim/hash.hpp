#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace xrg {

/// SHA-256 digest. Rendered as 64 lowercase hex characters.
struct Hash {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const Hash&) const = default;

  std::string to_hex() const;
  static std::optional<Hash> from_hex(std::string_view hex);
  static Hash zero() { return Hash{}; }
};

Hash sha256(std::span<const std::uint8_t> data);
Hash sha256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace xrg
