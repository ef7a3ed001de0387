#include "xrgsim/address.hpp"

#include "xrgsim/hash.hpp"

#include <span>

namespace xrg {

bool Address::valid() const {
  if (value.size() != 32) return false;
  for (char c : value) {
    bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!hex) return false;
  }
  return true;
}

Address derive_address(std::string_view registration_name) {
  Hash h = sha256(registration_name);
  return Address(to_hex(std::span<const std::uint8_t>(h.bytes.data(), 16)));
}

const Address& system_address() {
  static const Address addr = derive_address(kSystemName);
  return addr;
}

}  // namespace xrg
