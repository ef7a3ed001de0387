#pragma once

#include "xrgsim/address.hpp"
#include "xrgsim/amounts.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace xrg {

struct FeederEdge {
  std::string a;
  std::string b;
  Watts capacity_w = 0;

  bool operator==(const FeederEdge&) const = default;
};

/// Radial (tree) distribution network with scalar edge capacities and a
/// participant-to-node map. Power flows are additive magnitudes; the
/// bottleneck edge on the unique tree path limits each exchange.
class FeederGraph {
 public:
  FeederGraph() = default;
  /// Throws std::invalid_argument unless the edges form a connected
  /// acyclic graph over `nodes` with strictly positive capacities.
  FeederGraph(std::vector<std::string> nodes, std::vector<FeederEdge> edges,
              std::map<Address, std::string> locations);

  bool loaded() const { return !nodes_.empty(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<FeederEdge>& edges() const { return edges_; }
  const std::map<Address, std::string>& locations() const { return locations_; }

  bool has_node(const std::string& id) const { return node_index_.count(id) != 0; }
  /// Location of a participant, or empty string if unmapped.
  const std::string& location_of(const Address& who) const;

  /// Edge indices along the unique tree path a -> b (empty when a == b).
  /// Throws std::out_of_range for unknown nodes.
  std::vector<std::size_t> path_between(const std::string& a, const std::string& b) const;

  std::size_t edge_index(const std::string& a, const std::string& b) const;

  /// Applies a DSO capacity override to the edge between the two nodes.
  /// Throws std::out_of_range if no such edge exists.
  void set_capacity(const std::string& a, const std::string& b, Watts capacity_w);

 private:
  std::vector<std::string> nodes_;
  std::vector<FeederEdge> edges_;
  std::map<Address, std::string> locations_;
  std::map<std::string, std::size_t> node_index_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency_;  // (neighbor, edge)
};

/// Per-edge scheduled flow for one round; reset between rounds.
class FlowSchedule {
 public:
  FlowSchedule() = default;
  explicit FlowSchedule(std::size_t edge_count) : flow_w_(edge_count, 0) {}

  void reset() { flow_w_.assign(flow_w_.size(), 0); }
  Watts flow_on(std::size_t edge) const { return flow_w_.at(edge); }
  const std::vector<Watts>& flows() const { return flow_w_; }
  void add(std::size_t edge, Watts amount) { flow_w_.at(edge) += amount; }

 private:
  std::vector<Watts> flow_w_;
};

struct FeasibilityResult {
  Watts granted_w = 0;
  bool clipped = false;  // granted < requested

  bool operator==(const FeasibilityResult&) const = default;
};

/// Grants min(amount, bottleneck residual) along the tree path and books
/// the granted flow on every path edge. Requests between co-located
/// parties touch no edges and pass in full.
FeasibilityResult check_feasibility(const FeederGraph& graph, FlowSchedule& schedule,
                                    const std::string& from_node, const std::string& to_node,
                                    Watts amount_w);

}  // namespace xrg
