#include "xrgsim/chain_io.hpp"

#include <fstream>
#include <ostream>
#include <string>
#include <variant>

#include "json_codec.hpp"

namespace xrg {
namespace jsoncodec {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ChainIoError(what); }

Address address_field(const json& j, const char* key) {
  Address a{j.at(key).get<std::string>()};
  if (!a.valid()) bad(std::string("malformed address in field '") + key + "'");
  return a;
}

Hash hash_field(const json& j, const char* key) {
  const auto parsed = Hash::from_hex(j.at(key).get<std::string>());
  if (!parsed) bad(std::string("malformed hash in field '") + key + "'");
  return *parsed;
}

ordered_json window_to_json(const RoundWindow& w) {
  return ordered_json{{"first", w.first}, {"last", w.last}};
}

RoundWindow window_from_json(const json& j) {
  return {j.at("first").get<std::uint64_t>(), j.at("last").get<std::uint64_t>()};
}

}  // namespace

ordered_json order_to_json(const OrderData& order) {
  struct Visitor {
    ordered_json operator()(const Offer& o) const {
      return {{"type", "offer"},
              {"use_case", to_string(o.use_case)},
              {"seller", o.seller.value},
              {"quantity_wh", o.quantity_wh},
              {"unit_price", o.unit_price},
              {"location", o.location},
              {"seq", o.seq}};
    }
    ordered_json operator()(const Bid& b) const {
      return {{"type", "bid"},
              {"use_case", to_string(b.use_case)},
              {"buyer", b.buyer.value},
              {"quantity_wh", b.quantity_wh},
              {"budget", b.budget},
              {"location", b.location},
              {"seq", b.seq}};
    }
    ordered_json operator()(const AncillaryOffer& o) const {
      return {{"type", "ancillary_offer"},
              {"service", to_string(o.service)},
              {"provider", o.provider.value},
              {"capacity_w", o.capacity_w},
              {"unit_price", o.unit_price},
              {"seq", o.seq}};
    }
    ordered_json operator()(const AncillaryRequirement& r) const {
      return {{"type", "ancillary_requirement"},
              {"service", to_string(r.service)},
              {"poster", r.poster.value},
              {"capacity_w", r.capacity_w},
              {"budget", r.budget},
              {"seq", r.seq}};
    }
    ordered_json operator()(const EvseOffer& o) const {
      return {{"type", "evse_offer"},
              {"station", o.station.value},
              {"max_power_w", o.max_power_w},
              {"window", window_to_json(o.window)},
              {"unit_price", o.unit_price},
              {"location", o.location},
              {"seq", o.seq}};
    }
    ordered_json operator()(const EvBid& b) const {
      return {{"type", "ev_bid"},
              {"vehicle", b.vehicle.value},
              {"demand_wh", b.demand_wh},
              {"budget", b.budget},
              {"window", window_to_json(b.window)},
              {"seq", b.seq}};
    }
    ordered_json operator()(const NetworkConstraint& c) const {
      return {{"type", "network_constraint"},
              {"poster", c.poster.value},
              {"node_a", c.node_a},
              {"node_b", c.node_b},
              {"capacity_w", c.capacity_w},
              {"seq", c.seq}};
    }
  };
  return std::visit(Visitor{}, order);
}

OrderData order_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "offer") {
    Offer o;
    const auto uc = use_case_from_string(j.at("use_case").get<std::string>());
    if (!uc) bad("unknown use_case in offer");
    o.use_case = *uc;
    o.seller = address_field(j, "seller");
    o.quantity_wh = j.at("quantity_wh").get<WattHours>();
    o.unit_price = j.at("unit_price").get<Price>();
    o.location = j.value("location", std::string{});
    o.seq = j.at("seq").get<std::uint64_t>();
    return o;
  }
  if (type == "bid") {
    Bid b;
    const auto uc = use_case_from_string(j.at("use_case").get<std::string>());
    if (!uc) bad("unknown use_case in bid");
    b.use_case = *uc;
    b.buyer = address_field(j, "buyer");
    b.quantity_wh = j.at("quantity_wh").get<WattHours>();
    b.budget = j.at("budget").get<Amount>();
    b.location = j.value("location", std::string{});
    b.seq = j.at("seq").get<std::uint64_t>();
    return b;
  }
  if (type == "ancillary_offer") {
    AncillaryOffer o;
    const auto s = ancillary_service_from_string(j.at("service").get<std::string>());
    if (!s) bad("unknown service in ancillary_offer");
    o.service = *s;
    o.provider = address_field(j, "provider");
    o.capacity_w = j.at("capacity_w").get<Watts>();
    o.unit_price = j.at("unit_price").get<Price>();
    o.seq = j.at("seq").get<std::uint64_t>();
    return o;
  }
  if (type == "ancillary_requirement") {
    AncillaryRequirement r;
    const auto s = ancillary_service_from_string(j.at("service").get<std::string>());
    if (!s) bad("unknown service in ancillary_requirement");
    r.service = *s;
    r.poster = address_field(j, "poster");
    r.capacity_w = j.at("capacity_w").get<Watts>();
    r.budget = j.at("budget").get<Amount>();
    r.seq = j.at("seq").get<std::uint64_t>();
    return r;
  }
  if (type == "evse_offer") {
    EvseOffer o;
    o.station = address_field(j, "station");
    o.max_power_w = j.at("max_power_w").get<Watts>();
    o.window = window_from_json(j.at("window"));
    o.unit_price = j.at("unit_price").get<Price>();
    o.location = j.value("location", std::string{});
    o.seq = j.at("seq").get<std::uint64_t>();
    return o;
  }
  if (type == "ev_bid") {
    EvBid b;
    b.vehicle = address_field(j, "vehicle");
    b.demand_wh = j.at("demand_wh").get<WattHours>();
    b.budget = j.at("budget").get<Amount>();
    b.window = window_from_json(j.at("window"));
    b.seq = j.at("seq").get<std::uint64_t>();
    return b;
  }
  if (type == "network_constraint") {
    NetworkConstraint c;
    c.poster = address_field(j, "poster");
    c.node_a = j.at("node_a").get<std::string>();
    c.node_b = j.at("node_b").get<std::string>();
    c.capacity_w = j.at("capacity_w").get<Watts>();
    c.seq = j.at("seq").get<std::uint64_t>();
    return c;
  }
  bad("unknown order type: " + type);
}

ordered_json transaction_to_json(const Transaction& tx) {
  ordered_json j{{"sender", tx.sender.value}, {"seq", tx.seq}};
  struct Visitor {
    ordered_json& j;
    void operator()(const DataPostPayload& p) const {
      j["kind"] = "data_post";
      j["order"] = order_to_json(p.order);
    }
    void operator()(const TradeSettlementPayload& p) const {
      j["kind"] = "trade_settlement";
      j["use_case"] = to_string(p.use_case);
      j["seller"] = p.seller.value;
      j["buyer"] = p.buyer.value;
      j["quantity"] = p.quantity;
      j["unit_price"] = p.unit_price;
      j["payment"] = p.payment;
      j["fill_id"] = p.fill_id;
    }
    void operator()(const TokenTransferPayload& p) const {
      j["kind"] = "token_transfer";
      j["to"] = p.to.value;
      j["amount"] = p.amount;
      j["fill_id"] = p.fill_id;
    }
    void operator()(const TokenApprovePayload& p) const {
      j["kind"] = "token_approve";
      j["spender"] = p.spender.value;
      j["amount"] = p.amount;
    }
    void operator()(const StakePayload& p) const {
      j["kind"] = "stake";
      j["amount"] = p.amount;
    }
    void operator()(const UnstakePayload& p) const {
      j["kind"] = "unstake";
      j["amount"] = p.amount;
    }
    void operator()(const RewardPayload& p) const {
      j["kind"] = "reward";
      j["to"] = p.to.value;
      j["amount"] = p.amount;
    }
  };
  std::visit(Visitor{j}, tx.payload);
  return j;
}

Transaction transaction_from_json(const json& j) {
  Transaction tx;
  tx.sender = address_field(j, "sender");
  tx.seq = j.at("seq").get<std::uint64_t>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "data_post") {
    tx.payload = DataPostPayload{order_from_json(j.at("order"))};
  } else if (kind == "trade_settlement") {
    TradeSettlementPayload p;
    const auto uc = use_case_from_string(j.at("use_case").get<std::string>());
    if (!uc) bad("unknown use_case in trade_settlement");
    p.use_case = *uc;
    p.seller = address_field(j, "seller");
    p.buyer = address_field(j, "buyer");
    p.quantity = j.at("quantity").get<std::int64_t>();
    p.unit_price = j.at("unit_price").get<Price>();
    p.payment = j.at("payment").get<Amount>();
    p.fill_id = j.at("fill_id").get<std::uint64_t>();
    tx.payload = p;
  } else if (kind == "token_transfer") {
    TokenTransferPayload p;
    p.to = address_field(j, "to");
    p.amount = j.at("amount").get<Amount>();
    p.fill_id = j.at("fill_id").get<std::uint64_t>();
    tx.payload = p;
  } else if (kind == "token_approve") {
    tx.payload = TokenApprovePayload{address_field(j, "spender"),
                                     j.at("amount").get<Amount>()};
  } else if (kind == "stake") {
    tx.payload = StakePayload{j.at("amount").get<Amount>()};
  } else if (kind == "unstake") {
    tx.payload = UnstakePayload{j.at("amount").get<Amount>()};
  } else if (kind == "reward") {
    tx.payload = RewardPayload{address_field(j, "to"),
                               j.at("amount").get<Amount>()};
  } else {
    bad("unknown transaction kind: " + kind);
  }
  return tx;
}

ordered_json block_to_json(const Block& block) {
  ordered_json txs = ordered_json::array();
  for (const Transaction& tx : block.transactions) {
    txs.push_back(transaction_to_json(tx));
  }
  return {{"height", block.height},
          {"prev_hash", block.prev_hash.to_hex()},
          {"timestamp", block.timestamp},
          {"proposer", block.proposer.value},
          {"transactions", std::move(txs)},
          {"hash", block.hash.to_hex()}};
}

Block block_from_json(const json& j) {
  Block b;
  b.height = j.at("height").get<std::uint64_t>();
  b.prev_hash = hash_field(j, "prev_hash");
  b.timestamp = j.at("timestamp").get<std::uint64_t>();
  b.proposer = address_field(j, "proposer");
  for (const json& tj : j.at("transactions")) {
    b.transactions.push_back(transaction_from_json(tj));
  }
  b.hash = hash_field(j, "hash");
  return b;
}

}  // namespace jsoncodec

void export_chain(const Chain& chain, std::ostream& out) {
  for (const Block& block : chain.blocks()) {
    out << jsoncodec::block_to_json(block).dump() << '\n';
  }
}

void export_chain_file(const Chain& chain, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ChainIoError("cannot open chain file for writing: " + path);
  export_chain(chain, out);
  out.flush();
  if (!out) throw ChainIoError("failed writing chain file: " + path);
}

Chain import_chain(std::istream& in) {
  Chain chain;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      chain.push_back(jsoncodec::block_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ChainIoError("chain line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return chain;
}

Chain import_chain_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ChainIoError("cannot open chain file: " + path);
  return import_chain(in);
}

void append_token_snapshot(std::ostream& out, const TokenState& token,
                           std::uint64_t height) {
  using nlohmann::ordered_json;
  ordered_json balances = ordered_json::object();
  for (const auto& [who, amount] : token.balances()) balances[who.value] = amount;
  ordered_json stakes = ordered_json::object();
  for (const auto& [who, amount] : token.stakes()) stakes[who.value] = amount;
  ordered_json allowances = ordered_json::array();
  for (const auto& [pair, amount] : token.allowances()) {
    allowances.push_back({{"owner", pair.first.value},
                          {"spender", pair.second.value},
                          {"amount", amount}});
  }
  const ordered_json line{{"height", height},
                          {"total_supply", token.total_supply()},
                          {"balances", std::move(balances)},
                          {"stakes", std::move(stakes)},
                          {"allowances", std::move(allowances)}};
  out << line.dump() << '\n';
}

}  // namespace xrg
