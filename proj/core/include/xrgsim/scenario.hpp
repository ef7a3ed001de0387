#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xrgsim/address.hpp"
#include "xrgsim/amounts.hpp"
#include "xrgsim/consensus.hpp"
#include "xrgsim/grid.hpp"
#include "xrgsim/orders.hpp"
#include "xrgsim/permissions.hpp"
#include "xrgsim/state.hpp"
#include "xrgsim/tx.hpp"

namespace xrg {

struct ScenarioParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ParticipantRole : std::uint8_t {
  Prosumer = 1,
  Consumer = 2,
  Microgrid = 3,
  Dso = 4,
  Evse = 5,
  Ev = 6,
};

std::string_view to_string(ParticipantRole role);
std::optional<ParticipantRole> participant_role_from_string(std::string_view name);

struct ScenarioValidator {
  std::string name;
  Address id;  // derived from the name
  NodeRole role = NodeRole::Verifier;
  bool honest = true;
  AttackPlan attack;
};

struct ScenarioParticipant {
  std::string name;
  Address id;
  ParticipantRole role = ParticipantRole::Consumer;
  Amount genesis_balance = 0;
  Amount stake = 0;
  std::string location;  // feeder node, empty if unplaced
};

/// One order injection: fire `order` in `round`, optionally with its
/// quantity jittered by up to jitter_pct percent (seeded RNG).  Round
/// templates in the file are already expanded at load time.
struct ScriptedOrder {
  std::uint64_t round = 0;
  int jitter_pct = 0;
  OrderData order;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t rounds = 0;
  std::uint64_t seed = 0;
  std::uint64_t round_minutes = 60;
  /// Route peer-to-peer fills through the feeder feasibility check too
  /// (off by default: constraints gate the inter-microgrid case).
  bool feasibility_on_p2p = false;
  /// Seed balance for the system treasury (reward_policy "treasury" only).
  Amount treasury_units = 0;
  LedgerConfig ledger;

  std::vector<ScenarioValidator> validators;
  std::vector<ScenarioParticipant> participants;

  bool has_feeder = false;
  std::vector<std::string> feeder_nodes;
  std::vector<FeederEdge> feeder_edges;

  /// Sorted by round, stable in declaration order within a round.
  std::vector<ScriptedOrder> script;

  PermissionTable build_permissions() const;
  std::vector<ValidatorSpec> validator_specs() const;
  std::vector<Transaction> genesis_transactions() const;
  FeederGraph build_grid() const;  // unloaded graph when has_feeder is false
  const ScenarioParticipant* find_participant(const Address& id) const;
};

/// Parses and fully validates a scenario file.  Throws ScenarioParseError
/// for malformed JSON (with position) and ScenarioValidationError naming
/// the offending field for everything else.
ScenarioConfig load_scenario(const std::string& path);

/// Same, from an in-memory document; `origin` labels error messages.
ScenarioConfig load_scenario_text(const std::string& text, const std::string& origin);

}  // namespace xrg
