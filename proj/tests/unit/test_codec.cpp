#include <doctest.h>

#include <cstdint>
#include <vector>

#include "xrgsim/address.hpp"
#include "xrgsim/codec.hpp"
#include "xrgsim/tx.hpp"

using namespace xrg;

TEST_SUITE("codec") {

TEST_CASE("integers encode big-endian at fixed width") {
  ByteWriter w;
  w.u32(0x01020304u);
  w.u64(0x0102030405060708ull);
  const Bytes expect{0x01, 0x02, 0x03, 0x04, 0x01, 0x02,
                     0x03, 0x04, 0x05, 0x06, 0x07, 0x08};
  CHECK(w.bytes() == expect);
}

TEST_CASE("strings carry a u32 length prefix") {
  ByteWriter w;
  w.str("ab");
  const Bytes expect{0x00, 0x00, 0x00, 0x02, 'a', 'b'};
  CHECK(w.bytes() == expect);

  ByteWriter empty;
  empty.str("");
  const Bytes zero_len{0x00, 0x00, 0x00, 0x00};
  CHECK(empty.bytes() == zero_len);
}

TEST_CASE("transaction encoding is deterministic and injective on fields") {
  Transaction tx;
  tx.sender = derive_address("alice");
  tx.seq = 7;
  tx.payload = TokenTransferPayload{derive_address("bob"), 1234, 9};

  const Bytes once = encode_transaction(tx);
  const Bytes twice = encode_transaction(tx);
  CHECK(once == twice);

  Transaction other = tx;
  other.seq = 8;
  CHECK(encode_transaction(other) != once);

  other = tx;
  other.payload = TokenTransferPayload{derive_address("bob"), 1235, 9};
  CHECK(encode_transaction(other) != once);
}

TEST_CASE("transaction kind tags occupy the documented code points") {
  Transaction tx;
  tx.payload = DataPostPayload{};
  CHECK(tx.kind() == TxKind::DataPost);
  tx.payload = TradeSettlementPayload{};
  CHECK(tx.kind() == TxKind::TradeSettlement);
  tx.payload = TokenTransferPayload{};
  CHECK(tx.kind() == TxKind::TokenTransfer);
  tx.payload = TokenApprovePayload{};
  CHECK(tx.kind() == TxKind::TokenApprove);
  tx.payload = StakePayload{};
  CHECK(tx.kind() == TxKind::Stake);
  tx.payload = UnstakePayload{};
  CHECK(tx.kind() == TxKind::Unstake);
  tx.payload = RewardPayload{};
  CHECK(tx.kind() == TxKind::Reward);
}

TEST_CASE("payload kind is committed into the bytes") {
  // Same field bytes, different kind tag: Stake vs Unstake of equal amount.
  Transaction stake{derive_address("alice"), 1, StakePayload{500}};
  Transaction unstake{derive_address("alice"), 1, UnstakePayload{500}};
  CHECK(encode_transaction(stake) != encode_transaction(unstake));
}

TEST_CASE("order payloads with different variants never collide") {
  Offer offer;
  offer.seller = derive_address("p");
  offer.quantity_wh = 10;
  offer.unit_price = 5;

  Bid bid;
  bid.buyer = derive_address("p");
  bid.quantity_wh = 10;
  bid.budget = 5;

  ByteWriter wo;
  encode_order(wo, offer);
  ByteWriter wb;
  encode_order(wb, bid);
  CHECK(wo.bytes() != wb.bytes());
}

}  // TEST_SUITE
