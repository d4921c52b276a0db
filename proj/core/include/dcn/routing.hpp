#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcn/rng.hpp"
#include "dcn/topology.hpp"

namespace dcn {

/// Node sequence from source host to destination host. Length counts links.
struct Route {
  std::vector<NodeId> nodes;

  std::size_t length() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  friend bool operator==(const Route&, const Route&) = default;
};

/// Number of host-to-host segments: hosts on the route minus one. A hop
/// through a switch between two hosts counts once.
std::size_t host_hops(const Topology& topology, const Route& route);

std::string to_string(const Route& route);

/// Shortest-path next hops towards every host, stored flat.
class RoutingTable {
 public:
  RoutingTable() = default;

  std::size_t host_count() const { return hosts_; }
  /// Neighbours of `at` one step closer to host `dst_host` (a host index).
  /// Empty at the destination itself.
  std::span<const NodeId> next_hops(NodeId at, std::size_t dst_host) const {
    const std::size_t k = at.index() * hosts_ + dst_host;
    return {hops_.data() + offsets_[k], hops_.data() + offsets_[k + 1]};
  }
  std::uint32_t distance(NodeId at, std::size_t dst_host) const {
    return dist_[at.index() * hosts_ + dst_host];
  }

 private:
  friend RoutingTable compute_ecmp_tables(const Topology& topology);
  std::size_t hosts_ = 0;
  std::vector<std::uint32_t> offsets_;
  std::vector<NodeId> hops_;
  std::vector<std::uint32_t> dist_;
};

/// Throws DisconnectedError if some node cannot reach some host.
RoutingTable compute_ecmp_tables(const Topology& topology);

/// Hash-based pick: fixed for a given (flow_id, salt), spread evenly over
/// flow ids. `next_hops` must be non-empty.
NodeId ecmp_select(std::span<const NodeId> next_hops, std::uint64_t flow_id,
                   std::uint64_t salt = 0);

/// Follows the table from src to dst hashing (flow_id, salt, node) per hop.
Route ecmp_route(const Topology& topology, const RoutingTable& table, NodeId src, NodeId dst,
                 std::uint64_t flow_id, std::uint64_t salt = 0);

/// Follows the table choosing uniformly among next hops at every node.
Route random_route(const Topology& topology, const RoutingTable& table, NodeId src, NodeId dst,
                   Rng& rng);

/// Shortest path from src to dst that avoids `blocked` nodes and never relays
/// through a node that cannot forward. Ties break towards lower ids.
std::optional<Route> bfs_route(const Topology& topology, NodeId src, NodeId dst,
                               const std::vector<char>& blocked = {});

/// Up through random uplinks to the lowest common level, then the unique way
/// down. Fat tree and F10 only.
Route fat_tree_route(const Topology& topology, NodeId src, NodeId dst, Rng& rng);

/// Divide and conquer over the DCell levels.
Route dcell_route(const Topology& topology, NodeId src, NodeId dst);

/// Fixes one differing address digit per step, highest level first.
Route bcube_route(const Topology& topology, NodeId src, NodeId dst);

/// Fat-tree route that avoids the failed switch: keeps the normal route up to
/// the failed node's predecessor, then detours with a shortest search.
/// Throws NoRouteError when no detour exists.
Route f10_reroute(const Topology& topology, NodeId src, NodeId dst, NodeId failed, Rng& rng);

enum class RoutingMode { Ecmp, Random, Specialized };
std::string to_string(RoutingMode mode);
RoutingMode parse_routing_mode(const std::string& text);

/// Whether fat_tree_route, dcell_route or bcube_route applies.
bool has_specialized_routing(const Topology& topology);
Route specialized_route(const Topology& topology, NodeId src, NodeId dst, Rng& rng);

struct RouteCheck {
  bool ok = true;
  std::string problem;
};

/// Structural route checks: endpoints, adjacency, no repeats, interior nodes
/// allowed to forward.
RouteCheck check_route(const Topology& topology, const Route& route, NodeId src, NodeId dst);

}  // namespace dcn
