#include "grid_oracle.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace xrg::testing {

std::vector<OracleGrant> replay_flows(const std::vector<std::string>& nodes,
                                      const std::vector<FeederEdge>& edges,
                                      const std::vector<FlowRequest>& requests,
                                      std::vector<Watts>& residuals_out) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nodes.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[index.at(edges[e].a)].push_back({index.at(edges[e].b), e});
    adj[index.at(edges[e].b)].push_back({index.at(edges[e].a), e});
  }

  residuals_out.clear();
  for (const FeederEdge& e : edges) residuals_out.push_back(e.capacity_w);

  std::vector<OracleGrant> grants;
  for (const FlowRequest& req : requests) {
    OracleGrant grant;
    if (req.from == req.to) {
      // Co-located exchange: no feeder edge is used.
      grant.granted_w = std::max<Watts>(req.amount_w, 0);
      grants.push_back(grant);
      continue;
    }

    // Breadth-first search for the (unique, since radial) path.
    const std::size_t src = index.at(req.from);
    const std::size_t dst = index.at(req.to);
    std::vector<std::pair<std::size_t, std::size_t>> parent(nodes.size(),
                                                            {SIZE_MAX, SIZE_MAX});
    std::vector<bool> seen(nodes.size(), false);
    std::deque<std::size_t> queue{src};
    seen[src] = true;
    while (!queue.empty() && !seen[dst]) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (const auto& [v, e] : adj[u]) {
        if (seen[v]) continue;
        seen[v] = true;
        parent[v] = {u, e};
        queue.push_back(v);
      }
    }
    if (!seen[dst]) throw std::logic_error("grid oracle: disconnected request");

    std::vector<std::size_t> path;
    for (std::size_t v = dst; v != src; v = parent[v].first) {
      path.push_back(parent[v].second);
    }

    Watts bottleneck = req.amount_w;
    for (const std::size_t e : path) bottleneck = std::min(bottleneck, residuals_out[e]);
    bottleneck = std::max<Watts>(bottleneck, 0);

    for (const std::size_t e : path) residuals_out[e] -= bottleneck;
    grant.granted_w = bottleneck;
    grant.clipped = bottleneck < req.amount_w;
    grants.push_back(grant);
  }
  return grants;
}

}  // namespace xrg::testing
