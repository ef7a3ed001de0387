#include "xrgsim/codec.hpp"

namespace xrg {

void ByteWriter::u32(std::uint32_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 24));
  out_.push_back(static_cast<std::uint8_t>(v >> 16));
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  raw(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

void ByteWriter::raw(const std::uint8_t* data, std::size_t n) {
  out_.insert(out_.end(), data, data + n);
}

namespace {

// Order payload tags; see docs/encoding.md.
enum : std::uint8_t {
  kTagOffer = 1,
  kTagBid = 2,
  kTagAncillaryOffer = 3,
  kTagAncillaryRequirement = 4,
  kTagEvseOffer = 5,
  kTagEvBid = 6,
  kTagNetworkConstraint = 7,
};

struct OrderEncoder {
  ByteWriter& w;

  void operator()(const Offer& o) const {
    w.u8(kTagOffer);
    w.u8(static_cast<std::uint8_t>(o.use_case));
    w.str(o.seller.value);
    w.i64(o.quantity_wh);
    w.i64(o.unit_price);
    w.str(o.location);
    w.u64(o.seq);
  }
  void operator()(const Bid& b) const {
    w.u8(kTagBid);
    w.u8(static_cast<std::uint8_t>(b.use_case));
    w.str(b.buyer.value);
    w.i64(b.quantity_wh);
    w.i64(b.budget);
    w.str(b.location);
    w.u64(b.seq);
  }
  void operator()(const AncillaryOffer& o) const {
    w.u8(kTagAncillaryOffer);
    w.u8(static_cast<std::uint8_t>(o.service));
    w.str(o.provider.value);
    w.i64(o.capacity_w);
    w.i64(o.unit_price);
    w.u64(o.seq);
  }
  void operator()(const AncillaryRequirement& r) const {
    w.u8(kTagAncillaryRequirement);
    w.u8(static_cast<std::uint8_t>(r.service));
    w.str(r.poster.value);
    w.i64(r.capacity_w);
    w.i64(r.budget);
    w.u64(r.seq);
  }
  void operator()(const EvseOffer& o) const {
    w.u8(kTagEvseOffer);
    w.str(o.station.value);
    w.i64(o.max_power_w);
    w.u64(o.window.first);
    w.u64(o.window.last);
    w.i64(o.unit_price);
    w.str(o.location);
    w.u64(o.seq);
  }
  void operator()(const EvBid& b) const {
    w.u8(kTagEvBid);
    w.str(b.vehicle.value);
    w.i64(b.demand_wh);
    w.i64(b.budget);
    w.u64(b.window.first);
    w.u64(b.window.last);
    w.u64(b.seq);
  }
  void operator()(const NetworkConstraint& c) const {
    w.u8(kTagNetworkConstraint);
    w.str(c.poster.value);
    w.str(c.node_a);
    w.str(c.node_b);
    w.i64(c.capacity_w);
    w.u64(c.seq);
  }
};

struct PayloadEncoder {
  ByteWriter& w;

  void operator()(const DataPostPayload& p) const { encode_order(w, p.order); }
  void operator()(const TradeSettlementPayload& p) const {
    w.u8(static_cast<std::uint8_t>(p.use_case));
    w.str(p.seller.value);
    w.str(p.buyer.value);
    w.i64(p.quantity);
    w.i64(p.unit_price);
    w.i64(p.payment);
    w.u64(p.fill_id);
  }
  void operator()(const TokenTransferPayload& p) const {
    w.str(p.to.value);
    w.i64(p.amount);
    w.u64(p.fill_id);
  }
  void operator()(const TokenApprovePayload& p) const {
    w.str(p.spender.value);
    w.i64(p.amount);
  }
  void operator()(const StakePayload& p) const { w.i64(p.amount); }
  void operator()(const UnstakePayload& p) const { w.i64(p.amount); }
  void operator()(const RewardPayload& p) const {
    w.str(p.to.value);
    w.i64(p.amount);
  }
};

}  // namespace

void encode_order(ByteWriter& w, const OrderData& order) {
  std::visit(OrderEncoder{w}, order);
}

void encode_transaction(ByteWriter& w, const Transaction& tx) {
  w.u8(static_cast<std::uint8_t>(tx.kind()));
  w.str(tx.sender.value);
  w.u64(tx.seq);
  std::visit(PayloadEncoder{w}, tx.payload);
}

Bytes encode_transaction(const Transaction& tx) {
  ByteWriter w;
  encode_transaction(w, tx);
  return w.take();
}

}  // namespace xrg
