#pragma once

#include "xrgsim/block.hpp"
#include "xrgsim/metrics.hpp"
#include "xrgsim/permissions.hpp"
#include "xrgsim/scenario.hpp"
#include "xrgsim/state.hpp"
#include "xrgsim/token.hpp"

namespace xrg {

struct RunResult {
  Chain chain;  // the honest replica's finalized chain
  MetricsSummary metrics;
  LiveStats live;
  TokenState final_token;
  /// Every validator's final replica, for fork inspection.
  std::map<Address, Chain> replicas;
};

/// Drives a full scenario: per round, inject the scripted orders (with
/// seeded quantity jitter), clear the four market segments against the
/// admitted book, submit the resulting settlement transactions, then run
/// one consensus round.  Deterministic for a fixed scenario and seed.
RunResult run_simulation(const ScenarioConfig& config);

/// Minimal permission table under which an exported chain replays: every
/// order poster may post offers and bids, and the first poster of a
/// constraint or ancillary requirement is taken as the DSO (written into
/// `config`).  Lets `replay` audit a chain without the original scenario.
PermissionTable infer_permissions(const Chain& chain, LedgerConfig& config);

}  // namespace xrg
