#pragma once

#include "xrgsim/hash.hpp"
#include "xrgsim/tx.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace xrg {

using Bytes = std::vector<std::uint8_t>;

/// Canonical byte encoding shared by every replica. Field order is
/// fixed, integers are big-endian fixed width, strings and lists are
/// length-prefixed. The exact layout is documented in docs/encoding.md;
/// changing it changes every block hash.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  /// Signed quantities are always non-negative by type invariant; they
  /// are encoded as their u64 value.
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void str(std::string_view s);
  void raw(const std::uint8_t* data, std::size_t n);
  void hash(const Hash& h) { raw(h.bytes.data(), h.bytes.size()); }

  const Bytes& bytes() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

void encode_order(ByteWriter& w, const OrderData& order);
void encode_transaction(ByteWriter& w, const Transaction& tx);
Bytes encode_transaction(const Transaction& tx);

}  // namespace xrg
