#include "xrgsim/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace xrg {

FeederGraph::FeederGraph(std::vector<std::string> nodes, std::vector<FeederEdge> edges,
                         std::map<Address, std::string> locations)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), locations_(std::move(locations)) {
  if (nodes_.empty()) throw std::invalid_argument("feeder graph: no nodes");
  if (edges_.size() != nodes_.size() - 1) {
    throw std::invalid_argument("feeder graph: a radial network has exactly n-1 edges");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!node_index_.emplace(nodes_[i], i).second) {
      throw std::invalid_argument("feeder graph: duplicate node id " + nodes_[i]);
    }
  }
  adjacency_.resize(nodes_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const FeederEdge& edge = edges_[e];
    if (edge.capacity_w <= 0) {
      throw std::invalid_argument("feeder graph: edge capacity must be positive");
    }
    auto ia = node_index_.find(edge.a);
    auto ib = node_index_.find(edge.b);
    if (ia == node_index_.end() || ib == node_index_.end()) {
      throw std::invalid_argument("feeder graph: edge references unknown node");
    }
    adjacency_[ia->second].emplace_back(ib->second, e);
    adjacency_[ib->second].emplace_back(ia->second, e);
  }
  // n-1 edges + connectivity implies acyclic.
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (auto [w, _] : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; })) {
    throw std::invalid_argument("feeder graph: not connected");
  }
  for (auto& [who, node] : locations_) {
    if (!node_index_.count(node)) {
      throw std::invalid_argument("feeder graph: location references unknown node " + node);
    }
  }
}

const std::string& FeederGraph::location_of(const Address& who) const {
  static const std::string empty;
  auto it = locations_.find(who);
  return it == locations_.end() ? empty : it->second;
}

std::vector<std::size_t> FeederGraph::path_between(const std::string& a,
                                                   const std::string& b) const {
  auto ia = node_index_.find(a);
  auto ib = node_index_.find(b);
  if (ia == node_index_.end() || ib == node_index_.end()) {
    throw std::out_of_range("path_between: unknown node");
  }
  if (ia->second == ib->second) return {};

  // BFS from a; parents give the unique tree path.
  std::vector<std::pair<std::size_t, std::size_t>> parent(nodes_.size(), {SIZE_MAX, SIZE_MAX});
  std::vector<std::size_t> queue{ia->second};
  parent[ia->second] = {ia->second, SIZE_MAX};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::size_t v = queue[head];
    if (v == ib->second) break;
    for (auto [w, e] : adjacency_[v]) {
      if (parent[w].first == SIZE_MAX) {
        parent[w] = {v, e};
        queue.push_back(w);
      }
    }
  }
  std::vector<std::size_t> path;
  for (std::size_t v = ib->second; v != ia->second; v = parent[v].first) {
    path.push_back(parent[v].second);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::size_t FeederGraph::edge_index(const std::string& a, const std::string& b) const {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if ((edges_[e].a == a && edges_[e].b == b) || (edges_[e].a == b && edges_[e].b == a)) {
      return e;
    }
  }
  throw std::out_of_range("edge_index: no edge between " + a + " and " + b);
}

void FeederGraph::set_capacity(const std::string& a, const std::string& b, Watts capacity_w) {
  if (capacity_w <= 0) throw std::invalid_argument("set_capacity: capacity must be positive");
  edges_[edge_index(a, b)].capacity_w = capacity_w;
}

FeasibilityResult check_feasibility(const FeederGraph& graph, FlowSchedule& schedule,
                                    const std::string& from_node, const std::string& to_node,
                                    Watts amount_w) {
  if (amount_w < 0) throw std::invalid_argument("check_feasibility: negative amount");
  std::vector<std::size_t> path = graph.path_between(from_node, to_node);
  Watts granted = amount_w;
  for (std::size_t e : path) {
    Watts residual = graph.edges()[e].capacity_w - schedule.flow_on(e);
    granted = std::min(granted, std::max<Watts>(residual, 0));
  }
  for (std::size_t e : path) {
    schedule.add(e, granted);
  }
  return FeasibilityResult{granted, granted < amount_w};
}

}  // namespace xrg
