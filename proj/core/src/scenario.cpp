#include "xrgsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace xrg {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) {
  throw ScenarioValidationError(what);
}

// Field accessors that turn nlohmann's type errors into named-field
// validation errors.
const json& req(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) invalid("missing field '" + std::string(key) + "' in " + ctx);
  return *it;
}

std::string req_string(const json& j, const char* key, const std::string& ctx) {
  const json& v = req(j, key, ctx);
  if (!v.is_string()) invalid("field '" + std::string(key) + "' in " + ctx + " must be a string");
  return v.get<std::string>();
}

std::int64_t req_int(const json& j, const char* key, const std::string& ctx) {
  const json& v = req(j, key, ctx);
  if (!v.is_number_integer()) {
    invalid("field '" + std::string(key) + "' in " + ctx + " must be an integer");
  }
  return v.get<std::int64_t>();
}

std::uint64_t req_uint(const json& j, const char* key, const std::string& ctx) {
  const std::int64_t v = req_int(j, key, ctx);
  if (v < 0) invalid("field '" + std::string(key) + "' in " + ctx + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::int64_t opt_int(const json& j, const char* key, std::int64_t fallback,
                     const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) {
    invalid("field '" + std::string(key) + "' in " + ctx + " must be an integer");
  }
  return it->get<std::int64_t>();
}

bool opt_bool(const json& j, const char* key, bool fallback, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) {
    invalid("field '" + std::string(key) + "' in " + ctx + " must be a boolean");
  }
  return it->get<bool>();
}

AttackPlan parse_attack(const json& j, const std::string& ctx) {
  AttackPlan plan;
  const std::string action = req_string(j, "action", ctx);
  if (action == "forge_hash") {
    plan.action = AttackAction::ForgeHash;
  } else if (action == "invalid_tx") {
    plan.action = AttackAction::InvalidTx;
  } else {
    invalid("unknown attack action '" + action + "' in " + ctx);
  }
  plan.always = opt_bool(j, "always", false, ctx);
  if (auto it = j.find("rounds"); it != j.end()) {
    if (!it->is_array()) invalid("field 'rounds' in " + ctx + " must be an array");
    for (const json& r : *it) {
      if (!r.is_number_integer() || r.get<std::int64_t>() < 1) {
        invalid("attack rounds in " + ctx + " must be positive integers");
      }
      plan.rounds.insert(r.get<std::uint64_t>());
    }
  }
  if (!plan.always && plan.rounds.empty()) {
    invalid("attack in " + ctx + " fires never: set \"always\" or \"rounds\"");
  }
  return plan;
}

RoundWindow parse_window(const json& j, const std::string& ctx) {
  RoundWindow w;
  w.first = req_uint(j, "first", ctx);
  w.last = req_uint(j, "last", ctx);
  if (w.first > w.last) invalid("window in " + ctx + " has first > last");
  return w;
}

struct ScriptEntryTemplate {
  std::vector<std::uint64_t> rounds;
  int jitter_pct = 0;
  // Window offsets are resolved per firing round.
  bool has_window_offset = false;
  RoundWindow window_offset;
  OrderData prototype;
};

}  // namespace

std::string_view to_string(ParticipantRole role) {
  switch (role) {
    case ParticipantRole::Prosumer: return "prosumer";
    case ParticipantRole::Consumer: return "consumer";
    case ParticipantRole::Microgrid: return "microgrid";
    case ParticipantRole::Dso: return "dso";
    case ParticipantRole::Evse: return "evse";
    case ParticipantRole::Ev: return "ev";
  }
  return "unknown";
}

std::optional<ParticipantRole> participant_role_from_string(std::string_view name) {
  for (const ParticipantRole role :
       {ParticipantRole::Prosumer, ParticipantRole::Consumer, ParticipantRole::Microgrid,
        ParticipantRole::Dso, ParticipantRole::Evse, ParticipantRole::Ev}) {
    if (name == to_string(role)) return role;
  }
  return std::nullopt;
}

PermissionTable ScenarioConfig::build_permissions() const {
  PermissionTable table;
  for (const ScenarioValidator& v : validators) {
    table.grant(ActionKind::Vote, v.id);
    if (v.role == NodeRole::Controller) table.grant(ActionKind::ProposeBlock, v.id);
  }
  for (const ScenarioParticipant& p : participants) {
    table.grant(ActionKind::PostOffer, p.id);
    table.grant(ActionKind::PostBid, p.id);
    if (p.role == ParticipantRole::Dso) table.grant(ActionKind::PostConstraint, p.id);
  }
  return table;
}

std::vector<ValidatorSpec> ScenarioConfig::validator_specs() const {
  std::vector<ValidatorSpec> specs;
  specs.reserve(validators.size());
  for (const ScenarioValidator& v : validators) {
    specs.push_back({v.id, v.role, v.honest, v.attack});
  }
  return specs;
}

std::vector<Transaction> ScenarioConfig::genesis_transactions() const {
  std::vector<Transaction> txs;
  std::uint64_t system_seq = 0;
  const Address& system = system_address();

  if (ledger.reward_policy == RewardPolicy::Treasury && treasury_units > 0) {
    txs.push_back({system, system_seq++, RewardPayload{system, treasury_units}});
  }
  for (const ScenarioParticipant& p : participants) {
    if (p.genesis_balance > 0) {
      txs.push_back({system, system_seq++, RewardPayload{p.id, p.genesis_balance}});
    }
  }
  for (const ScenarioParticipant& p : participants) {
    if (p.stake > 0) {
      txs.push_back({p.id, 0, StakePayload{p.stake}});
    }
  }
  return txs;
}

FeederGraph ScenarioConfig::build_grid() const {
  if (!has_feeder) return {};
  std::map<Address, std::string> locations;
  for (const ScenarioParticipant& p : participants) {
    if (!p.location.empty()) locations[p.id] = p.location;
  }
  return FeederGraph(feeder_nodes, feeder_edges, std::move(locations));
}

const ScenarioParticipant* ScenarioConfig::find_participant(const Address& id) const {
  for (const ScenarioParticipant& p : participants) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

namespace {

// ---- order parsing -------------------------------------------------------

OrderData parse_order_prototype(const json& j, const std::string& type,
                                const ScenarioParticipant& party,
                                const std::string& ctx,
                                bool& wants_window) {
  wants_window = false;
  if (type == "offer") {
    Offer o;
    o.seller = party.id;
    const std::string uc = req_string(j, "use_case", ctx);
    const auto parsed = use_case_from_string(uc);
    if (!parsed || (*parsed != UseCase::PeerToPeer && *parsed != UseCase::InterMicrogrid)) {
      invalid("offer in " + ctx + " must have use_case peer_to_peer or inter_microgrid");
    }
    o.use_case = *parsed;
    o.quantity_wh = req_int(j, "quantity_wh", ctx);
    o.unit_price = req_int(j, "unit_price", ctx);
    o.location = party.location;
    if (o.quantity_wh <= 0) invalid("offer quantity_wh in " + ctx + " must be positive");
    if (o.unit_price < 0) invalid("offer unit_price in " + ctx + " must be non-negative");
    return o;
  }
  if (type == "bid") {
    Bid b;
    b.buyer = party.id;
    const std::string uc = req_string(j, "use_case", ctx);
    const auto parsed = use_case_from_string(uc);
    if (!parsed || (*parsed != UseCase::PeerToPeer && *parsed != UseCase::InterMicrogrid)) {
      invalid("bid in " + ctx + " must have use_case peer_to_peer or inter_microgrid");
    }
    b.use_case = *parsed;
    b.quantity_wh = req_int(j, "quantity_wh", ctx);
    b.budget = req_int(j, "budget", ctx);
    b.location = party.location;
    if (b.quantity_wh <= 0) invalid("bid quantity_wh in " + ctx + " must be positive");
    if (b.budget < 0) invalid("bid budget in " + ctx + " must be non-negative");
    return b;
  }
  if (type == "ancillary_offer") {
    AncillaryOffer o;
    o.provider = party.id;
    const auto service = ancillary_service_from_string(req_string(j, "service", ctx));
    if (!service) invalid("unknown ancillary service in " + ctx);
    o.service = *service;
    o.capacity_w = req_int(j, "capacity_w", ctx);
    o.unit_price = req_int(j, "unit_price", ctx);
    if (o.capacity_w <= 0) invalid("ancillary capacity_w in " + ctx + " must be positive");
    if (o.unit_price < 0) invalid("ancillary unit_price in " + ctx + " must be non-negative");
    return o;
  }
  if (type == "ancillary_requirement") {
    AncillaryRequirement r;
    r.poster = party.id;
    const auto service = ancillary_service_from_string(req_string(j, "service", ctx));
    if (!service) invalid("unknown ancillary service in " + ctx);
    r.service = *service;
    r.capacity_w = req_int(j, "capacity_w", ctx);
    r.budget = req_int(j, "budget", ctx);
    if (r.capacity_w <= 0) invalid("requirement capacity_w in " + ctx + " must be positive");
    if (r.budget < 0) invalid("requirement budget in " + ctx + " must be non-negative");
    return r;
  }
  if (type == "evse_offer") {
    EvseOffer o;
    o.station = party.id;
    o.max_power_w = req_int(j, "max_power_w", ctx);
    o.unit_price = req_int(j, "unit_price", ctx);
    o.location = party.location;
    if (o.max_power_w <= 0) invalid("evse max_power_w in " + ctx + " must be positive");
    if (o.unit_price < 0) invalid("evse unit_price in " + ctx + " must be non-negative");
    wants_window = true;
    return o;
  }
  if (type == "ev_bid") {
    EvBid b;
    b.vehicle = party.id;
    b.demand_wh = req_int(j, "demand_wh", ctx);
    b.budget = req_int(j, "budget", ctx);
    if (b.demand_wh <= 0) invalid("ev demand_wh in " + ctx + " must be positive");
    if (b.budget < 0) invalid("ev budget in " + ctx + " must be non-negative");
    wants_window = true;
    return b;
  }
  if (type == "network_constraint") {
    NetworkConstraint c;
    c.poster = party.id;
    c.node_a = req_string(j, "node_a", ctx);
    c.node_b = req_string(j, "node_b", ctx);
    c.capacity_w = req_int(j, "capacity_w", ctx);
    if (c.capacity_w <= 0) invalid("constraint capacity_w in " + ctx + " must be positive");
    return c;
  }
  invalid("unknown order type '" + type + "' in " + ctx);
}

void set_window(OrderData& order, const RoundWindow& w) {
  if (auto* evse = std::get_if<EvseOffer>(&order)) {
    evse->window = w;
  } else if (auto* ev = std::get_if<EvBid>(&order)) {
    ev->window = w;
  }
}

// ---- whole-file parsing ---------------------------------------------------

ScenarioConfig parse_scenario(const json& root, const std::string& origin) {
  if (!root.is_object()) invalid("scenario root in " + origin + " must be an object");
  ScenarioConfig cfg;
  cfg.name = req_string(root, "name", origin);
  cfg.rounds = req_uint(root, "rounds", origin);
  if (cfg.rounds < 1) invalid("field 'rounds' must be at least 1");
  cfg.seed = req_uint(root, "seed", origin);

  if (auto it = root.find("constants"); it != root.end()) {
    const json& c = *it;
    const std::string ctx = "constants";
    cfg.ledger.min_stake = opt_int(c, "min_stake_units", cfg.ledger.min_stake, ctx);
    cfg.ledger.reward_per_trade =
        opt_int(c, "reward_per_trade_units", cfg.ledger.reward_per_trade, ctx);
    cfg.round_minutes =
        static_cast<std::uint64_t>(opt_int(c, "round_minutes", 60, ctx));
    cfg.feasibility_on_p2p = opt_bool(c, "feasibility_on_p2p", false, ctx);
    cfg.treasury_units = opt_int(c, "treasury_units", 0, ctx);
    if (auto rp = c.find("reward_policy"); rp != c.end()) {
      const std::string policy = rp->get<std::string>();
      if (policy == "mint") {
        cfg.ledger.reward_policy = RewardPolicy::Mint;
      } else if (policy == "treasury") {
        cfg.ledger.reward_policy = RewardPolicy::Treasury;
      } else {
        invalid("unknown reward_policy '" + policy + "'");
      }
    }
    if (cfg.ledger.min_stake < 0) invalid("min_stake_units must be non-negative");
    if (cfg.ledger.reward_per_trade < 0) invalid("reward_per_trade_units must be non-negative");
    if (cfg.round_minutes < 1) invalid("round_minutes must be at least 1");
    if (cfg.treasury_units < 0) invalid("treasury_units must be non-negative");
  }
  if (cfg.ledger.reward_policy == RewardPolicy::Treasury && cfg.treasury_units <= 0) {
    invalid("reward_policy 'treasury' requires positive treasury_units");
  }

  std::set<std::string> names{std::string(kSystemName)};
  auto claim_name = [&](const std::string& name, const std::string& ctx) {
    if (name.empty()) invalid("empty name in " + ctx);
    if (!names.insert(name).second) {
      invalid("duplicate or reserved name '" + name + "' in " + ctx);
    }
  };

  const json& jvalidators = req(root, "validators", origin);
  if (!jvalidators.is_array() || jvalidators.empty()) {
    invalid("field 'validators' must be a non-empty array");
  }
  bool any_honest = false;
  for (const json& jv : jvalidators) {
    const std::string ctx = "validators[" + std::to_string(cfg.validators.size()) + "]";
    ScenarioValidator v;
    v.name = req_string(jv, "name", ctx);
    claim_name(v.name, ctx);
    v.id = derive_address(v.name);
    const std::string role = req_string(jv, "role", ctx);
    if (role == "controller") {
      v.role = NodeRole::Controller;
    } else if (role == "verifier") {
      v.role = NodeRole::Verifier;
    } else {
      invalid("unknown validator role '" + role + "' in " + ctx);
    }
    v.honest = opt_bool(jv, "honest", true, ctx);
    if (auto it = jv.find("attack"); it != jv.end()) {
      if (v.honest) invalid("honest validator '" + v.name + "' cannot carry an attack");
      v.attack = parse_attack(*it, ctx);
    }
    any_honest = any_honest || v.honest;
    cfg.validators.push_back(std::move(v));
  }
  if (!any_honest) invalid("at least one validator must be honest");
  if (std::none_of(cfg.validators.begin(), cfg.validators.end(),
                   [](const ScenarioValidator& v) { return v.role == NodeRole::Controller; })) {
    invalid("at least one validator must be a controller (proposer)");
  }

  const json& jparticipants = req(root, "participants", origin);
  if (!jparticipants.is_array()) invalid("field 'participants' must be an array");
  std::size_t dso_count = 0;
  for (const json& jp : jparticipants) {
    const std::string ctx = "participants[" + std::to_string(cfg.participants.size()) + "]";
    ScenarioParticipant p;
    p.name = req_string(jp, "name", ctx);
    claim_name(p.name, ctx);
    p.id = derive_address(p.name);
    const auto role = participant_role_from_string(req_string(jp, "role", ctx));
    if (!role) invalid("unknown participant role in " + ctx);
    p.role = *role;
    p.genesis_balance = opt_int(jp, "genesis_balance_units", 0, ctx);
    p.stake = opt_int(jp, "stake_units", 0, ctx);
    if (p.genesis_balance < 0) invalid("genesis_balance_units in " + ctx + " must be non-negative");
    if (p.stake < 0) invalid("stake_units in " + ctx + " must be non-negative");
    if (p.stake > p.genesis_balance) {
      invalid("participant '" + p.name + "' stakes more than its genesis balance");
    }
    if (auto it = jp.find("location"); it != jp.end()) {
      p.location = it->get<std::string>();
    }
    if (p.role == ParticipantRole::Dso) {
      ++dso_count;
      cfg.ledger.dso = p.id;
    }
    cfg.participants.push_back(std::move(p));
  }
  if (dso_count > 1) invalid("at most one DSO participant is allowed");

  if (auto it = root.find("feeder"); it != root.end()) {
    const json& f = *it;
    cfg.has_feeder = true;
    for (const json& n : req(f, "nodes", "feeder")) {
      if (!n.is_string()) invalid("feeder nodes must be strings");
      cfg.feeder_nodes.push_back(n.get<std::string>());
    }
    for (const json& e : req(f, "edges", "feeder")) {
      FeederEdge edge;
      edge.a = req_string(e, "a", "feeder.edges");
      edge.b = req_string(e, "b", "feeder.edges");
      edge.capacity_w = req_int(e, "capacity_w", "feeder.edges");
      cfg.feeder_edges.push_back(std::move(edge));
    }
  }

  // Participant locations must exist on the feeder; a located participant
  // without any feeder is a scenario bug.
  for (const ScenarioParticipant& p : cfg.participants) {
    if (p.location.empty()) continue;
    if (!cfg.has_feeder) {
      invalid("participant '" + p.name + "' has a location but no feeder is defined");
    }
    if (std::find(cfg.feeder_nodes.begin(), cfg.feeder_nodes.end(), p.location) ==
        cfg.feeder_nodes.end()) {
      invalid("participant '" + p.name + "' is located at unknown feeder node '" +
              p.location + "'");
    }
  }

  // ---- order script ----
  bool uses_uc23 = false;
  if (auto it = root.find("orders"); it != root.end()) {
    if (!it->is_array()) invalid("field 'orders' must be an array");
    std::size_t index = 0;
    std::vector<ScriptEntryTemplate> templates;
    std::vector<const json*> template_sources;
    for (const json& jo : *it) {
      const std::string ctx = "orders[" + std::to_string(index) + "]";
      ++index;

      ScriptEntryTemplate entry;
      const bool has_round = jo.contains("round");
      const bool has_rounds = jo.contains("rounds");
      if (has_round == has_rounds) {
        invalid(ctx + " must carry exactly one of 'round' or 'rounds'");
      }
      if (has_round) {
        entry.rounds.push_back(req_uint(jo, "round", ctx));
      } else {
        const json& r = jo.at("rounds");
        const std::uint64_t from = req_uint(r, "from", ctx + ".rounds");
        const std::uint64_t to = req_uint(r, "to", ctx + ".rounds");
        const std::uint64_t step =
            static_cast<std::uint64_t>(opt_int(r, "step", 1, ctx + ".rounds"));
        if (step < 1) invalid(ctx + ".rounds.step must be at least 1");
        if (from > to) invalid(ctx + ".rounds has from > to");
        for (std::uint64_t round = from; round <= to; round += step) {
          entry.rounds.push_back(round);
        }
      }
      for (const std::uint64_t round : entry.rounds) {
        if (round < 1 || round > cfg.rounds) {
          invalid(ctx + " fires outside rounds 1.." + std::to_string(cfg.rounds));
        }
      }

      entry.jitter_pct = static_cast<int>(opt_int(jo, "jitter_pct", 0, ctx));
      if (entry.jitter_pct < 0 || entry.jitter_pct > 100) {
        invalid(ctx + ".jitter_pct must be within 0..100");
      }

      const std::string party_name = req_string(jo, "party", ctx);
      const Address party_id = derive_address(party_name);
      const ScenarioParticipant* party = cfg.find_participant(party_id);
      if (party == nullptr || party->name != party_name) {
        invalid(ctx + " references undeclared participant '" + party_name + "'");
      }

      const std::string type = req_string(jo, "type", ctx);
      bool wants_window = false;
      entry.prototype = parse_order_prototype(jo, type, *party, ctx, wants_window);

      // Role typing: each order type has a natural poster.
      const UseCase uc = use_case_of(entry.prototype);
      if (uc == UseCase::InterMicrogrid || uc == UseCase::AncillaryDso) uses_uc23 = true;
      if (type == "offer" || type == "bid") {
        if (uc == UseCase::InterMicrogrid && party->role != ParticipantRole::Microgrid) {
          invalid(ctx + ": inter-microgrid orders must come from microgrid participants");
        }
      } else if (type == "evse_offer") {
        if (party->role != ParticipantRole::Evse) {
          invalid(ctx + ": evse_offer must come from an evse participant");
        }
      } else if (type == "ev_bid") {
        if (party->role != ParticipantRole::Ev) {
          invalid(ctx + ": ev_bid must come from an ev participant");
        }
      } else if (type == "ancillary_requirement" || type == "network_constraint") {
        if (party->role != ParticipantRole::Dso) {
          invalid(ctx + ": " + type + " must come from the DSO");
        }
      }
      if ((type == "offer" || type == "bid") && uc == UseCase::InterMicrogrid &&
          party->location.empty()) {
        invalid(ctx + ": inter-microgrid parties need a feeder location");
      }
      if (type == "network_constraint") {
        const auto& c = std::get<NetworkConstraint>(entry.prototype);
        const bool known =
            std::any_of(cfg.feeder_edges.begin(), cfg.feeder_edges.end(),
                        [&](const FeederEdge& e) {
                          return (e.a == c.node_a && e.b == c.node_b) ||
                                 (e.a == c.node_b && e.b == c.node_a);
                        });
        if (!known) invalid(ctx + ": constraint names a nonexistent feeder edge");
      }

      if (wants_window) {
        const bool has_abs = jo.contains("window");
        const bool has_rel = jo.contains("window_offset");
        if (has_abs == has_rel) {
          invalid(ctx + " must carry exactly one of 'window' or 'window_offset'");
        }
        if (has_abs) {
          set_window(entry.prototype, parse_window(jo.at("window"), ctx + ".window"));
        } else {
          entry.has_window_offset = true;
          entry.window_offset = parse_window(jo.at("window_offset"), ctx + ".window_offset");
        }
      }

      templates.push_back(std::move(entry));
      template_sources.push_back(&jo);
    }

    // Expand templates: fire in round order, declaration order within a
    // round.  Window offsets resolve against the firing round.
    for (std::uint64_t round = 1; round <= cfg.rounds; ++round) {
      for (const ScriptEntryTemplate& entry : templates) {
        if (std::find(entry.rounds.begin(), entry.rounds.end(), round) ==
            entry.rounds.end()) {
          continue;
        }
        ScriptedOrder fire;
        fire.round = round;
        fire.jitter_pct = entry.jitter_pct;
        fire.order = entry.prototype;
        if (entry.has_window_offset) {
          set_window(fire.order, {round + entry.window_offset.first,
                                  round + entry.window_offset.last});
        }
        cfg.script.push_back(std::move(fire));
      }
    }
  }

  if (uses_uc23 && dso_count != 1) {
    invalid("use cases 2 and 3 require exactly one DSO participant");
  }
  if (uses_uc23) {
    // The inter-microgrid path needs a feeder to clear against.
    const bool any_uc2 = std::any_of(
        cfg.script.begin(), cfg.script.end(), [](const ScriptedOrder& s) {
          return use_case_of(s.order) == UseCase::InterMicrogrid;
        });
    if (any_uc2 && !cfg.has_feeder) {
      invalid("inter-microgrid orders require a feeder definition");
    }
  }
  if (cfg.feasibility_on_p2p && !cfg.has_feeder) {
    invalid("feasibility_on_p2p requires a feeder definition");
  }

  // Building the graph validates radial structure, capacities, and node
  // references; surface its complaints as scenario validation errors.
  if (cfg.has_feeder) {
    try {
      (void)cfg.build_grid();
    } catch (const std::invalid_argument& e) {
      invalid(std::string("feeder: ") + e.what());
    }
  }

  return cfg;
}

}  // namespace

ScenarioConfig load_scenario_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(origin + ": " + e.what());
  }
  return parse_scenario(root, origin);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioParseError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario_text(buffer.str(), path);
}

}  // namespace xrg
