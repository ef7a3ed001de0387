#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xrgsim/amounts.hpp"
#include "xrgsim/grid.hpp"

namespace xrg::testing {

struct FlowRequest {
  std::string from;
  std::string to;
  Watts amount_w = 0;
};

struct OracleGrant {
  Watts granted_w = 0;
  bool clipped = false;

  bool operator==(const OracleGrant&) const = default;
};

/// Replays a request sequence against its own residual bookkeeping:
/// adjacency built directly from the edge list, paths found by breadth-first
/// search, and every grant debited from per-edge residuals.  Returns the
/// per-request grants and leaves the final residuals in `residuals_out`
/// (keyed by edge index in `edges` order).
std::vector<OracleGrant> replay_flows(const std::vector<std::string>& nodes,
                                      const std::vector<FeederEdge>& edges,
                                      const std::vector<FlowRequest>& requests,
                                      std::vector<Watts>& residuals_out);

}  // namespace xrg::testing
