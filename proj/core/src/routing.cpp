#include "dcn/routing.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include <fmt/core.h>

#include "dcn/builders.hpp"
#include "dcn/errors.hpp"
#include "dcn/metrics.hpp"

namespace dcn {
namespace {

std::size_t host_index_of(const Topology& t, NodeId h) {
  auto idx = t.host_index(h);
  if (!idx) throw std::invalid_argument(fmt::format("node {} is not a host", h.value));
  return *idx;
}

void require_pair(const Topology& t, NodeId src, NodeId dst) {
  host_index_of(t, src);
  host_index_of(t, dst);
  if (src == dst) throw std::invalid_argument("source and destination coincide");
}

std::uint32_t tier(const Topology& t, NodeId v) { return t.node(v).address.digits.at(0); }

bool is_fat_tree_family(const Topology& t) {
  return std::holds_alternative<FatTreeParams>(t.params()) ||
         std::holds_alternative<F10Params>(t.params());
}

void dcell_path(const DCellLayout& layout, std::uint64_t s, std::uint64_t d,
                std::vector<NodeId>& out) {
  if (s == d) {
    out.push_back(NodeId(s));
    return;
  }
  std::uint32_t l = 0;
  while (s / layout.t[l] != d / layout.t[l]) ++l;
  if (l == 0) {
    out.push_back(NodeId(s));
    out.push_back(layout.cell_switch(s));
    out.push_back(NodeId(d));
    return;
  }
  const std::uint64_t base = s / layout.t[l] * layout.t[l];
  const std::uint64_t sub = layout.t[l - 1];
  const auto [x, y] = layout.level_link(l, base, (s - base) / sub, (d - base) / sub);
  dcell_path(layout, s, x, out);
  dcell_path(layout, y, d, out);
}

}  // namespace

std::size_t host_hops(const Topology& topology, const Route& route) {
  std::size_t hosts = 0;
  for (NodeId v : route.nodes)
    if (topology.node(v).is_host()) ++hosts;
  return hosts == 0 ? 0 : hosts - 1;
}

std::string to_string(const Route& route) {
  std::string out;
  for (std::size_t i = 0; i < route.nodes.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(route.nodes[i].value);
  }
  return out;
}

RoutingTable compute_ecmp_tables(const Topology& topology) {
  RoutingTable table;
  const std::size_t n = topology.node_count();
  const std::size_t h = topology.host_count();
  table.hosts_ = h;
  table.dist_.assign(n * h, kUnreachable);
  for (std::size_t d = 0; d < h; ++d) {
    const auto dist = bfs_distances(topology, topology.host(d));
    for (std::size_t v = 0; v < n; ++v) table.dist_[v * h + d] = dist[v];
  }
  table.offsets_.reserve(n * h + 1);
  table.offsets_.push_back(0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t d = 0; d < h; ++d) {
      const std::uint32_t dv = table.dist_[v * h + d];
      if (dv == kUnreachable) {
        throw DisconnectedError(fmt::format("node {} cannot reach host {}", v, d));
      }
      const NodeId dst = topology.host(d);
      if (dv > 0) {
        for (const auto& inc : topology.neighbors(NodeId(v))) {
          const NodeId w = inc.neighbor;
          if (table.dist_[w.index() * h + d] + 1 != dv) continue;
          if (w != dst && !topology.can_forward(w)) continue;
          table.hops_.push_back(w);
        }
        // Parallel incidences to the same neighbour would appear twice.
        auto first = table.hops_.begin() + table.offsets_.back();
        std::sort(first, table.hops_.end());
        table.hops_.erase(std::unique(first, table.hops_.end()), table.hops_.end());
      }
      table.offsets_.push_back(static_cast<std::uint32_t>(table.hops_.size()));
    }
  }
  return table;
}

NodeId ecmp_select(std::span<const NodeId> next_hops, std::uint64_t flow_id, std::uint64_t salt) {
  if (next_hops.empty()) throw std::invalid_argument("ecmp_select needs at least one candidate");
  const std::uint64_t hash = splitmix64(splitmix64(flow_id) ^ salt);
  return next_hops[static_cast<std::size_t>((static_cast<uint128_t>(hash) * next_hops.size()) >> 64)];
}

Route ecmp_route(const Topology& topology, const RoutingTable& table, NodeId src, NodeId dst,
                 std::uint64_t flow_id, std::uint64_t salt) {
  require_pair(topology, src, dst);
  const std::size_t d = host_index_of(topology, dst);
  Route r{{src}};
  for (NodeId at = src; at != dst;) {
    at = ecmp_select(table.next_hops(at, d), flow_id, splitmix64(salt ^ (std::uint64_t{at.value} << 20) ^ d));
    r.nodes.push_back(at);
  }
  return r;
}

Route random_route(const Topology& topology, const RoutingTable& table, NodeId src, NodeId dst,
                   Rng& rng) {
  require_pair(topology, src, dst);
  const std::size_t d = host_index_of(topology, dst);
  Route r{{src}};
  for (NodeId at = src; at != dst;) {
    const auto hops = table.next_hops(at, d);
    at = hops[rng.uniform(hops.size())];
    r.nodes.push_back(at);
  }
  return r;
}

std::optional<Route> bfs_route(const Topology& topology, NodeId src, NodeId dst,
                               const std::vector<char>& blocked) {
  const std::size_t n = topology.node_count();
  auto is_blocked = [&](NodeId v) { return !blocked.empty() && blocked[v.index()]; };
  if (is_blocked(src) || is_blocked(dst)) return std::nullopt;
  std::vector<std::uint32_t> parent(n, kUnreachable);
  parent[src.index()] = src.value;
  std::deque<NodeId> q{src};
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop_front();
    if (v == dst) break;
    if (v != src && !topology.can_forward(v)) continue;
    for (const auto& inc : topology.neighbors(v)) {
      const NodeId w = inc.neighbor;
      if (parent[w.index()] != kUnreachable || is_blocked(w)) continue;
      parent[w.index()] = v.value;
      q.push_back(w);
    }
  }
  if (parent[dst.index()] == kUnreachable) return std::nullopt;
  Route r;
  for (NodeId v = dst; v != src; v = NodeId(parent[v.index()])) r.nodes.push_back(v);
  r.nodes.push_back(src);
  std::reverse(r.nodes.begin(), r.nodes.end());
  return r;
}

Route fat_tree_route(const Topology& topology, NodeId src, NodeId dst, Rng& rng) {
  if (!is_fat_tree_family(topology)) throw std::invalid_argument("fat_tree_route needs a fat tree or F10");
  require_pair(topology, src, dst);
  const auto& sa = topology.node(src).address.digits;
  const auto& da = topology.node(dst).address.digits;
  // Host address {0, pod, edge, slot}; turn around at the lowest tier whose
  // subtree holds both hosts.
  const std::uint32_t top = sa[1] != da[1] ? 3 : (sa[2] != da[2] ? 2 : 1);

  Route r{{src}};
  NodeId at = topology.neighbors(src)[0].neighbor;
  r.nodes.push_back(at);
  while (tier(topology, at) < top) {
    std::vector<NodeId> up;
    for (const auto& inc : topology.neighbors(at))
      if (tier(topology, inc.neighbor) == tier(topology, at) + 1) up.push_back(inc.neighbor);
    at = up[rng.uniform(up.size())];
    r.nodes.push_back(at);
  }
  while (tier(topology, at) > 1) {
    // Core picks the aggregation switch in dst's pod, aggregation picks dst's edge.
    const std::uint32_t want_tier = tier(topology, at) - 1;
    const std::uint32_t key = want_tier == 2 ? da[1] : da[2];
    const std::size_t key_pos = want_tier == 2 ? 1 : 2;
    NodeId next = at;
    for (const auto& inc : topology.neighbors(at)) {
      const auto& a = topology.node(inc.neighbor).address.digits;
      if (a[0] == want_tier && a[key_pos] == key && (want_tier == 2 || a[1] == da[1])) {
        next = inc.neighbor;
        break;
      }
    }
    if (next == at) throw NoRouteError("fat tree down path is missing a link");
    at = next;
    r.nodes.push_back(at);
  }
  r.nodes.push_back(dst);
  return r;
}

Route dcell_route(const Topology& topology, NodeId src, NodeId dst) {
  const DCellLayout layout = DCellLayout::of(topology);
  require_pair(topology, src, dst);
  Route r;
  dcell_path(layout, src.index(), dst.index(), r.nodes);
  return r;
}

Route bcube_route(const Topology& topology, NodeId src, NodeId dst) {
  const BCubeLayout layout = BCubeLayout::of(topology);
  require_pair(topology, src, dst);
  Route r{{src}};
  std::uint64_t cur = src.index();
  for (std::uint32_t i = layout.k + 1; i-- > 0;) {
    const std::uint32_t want = layout.digit(dst.index(), i);
    if (layout.digit(cur, i) == want) continue;
    r.nodes.push_back(layout.level_switch(i, cur));
    cur = layout.with_digit(cur, i, want);
    r.nodes.push_back(NodeId(cur));
  }
  return r;
}

Route f10_reroute(const Topology& topology, NodeId src, NodeId dst, NodeId failed, Rng& rng) {
  Route normal = fat_tree_route(topology, src, dst, rng);
  const auto it = std::find(normal.nodes.begin(), normal.nodes.end(), failed);
  if (it == normal.nodes.end()) return normal;
  if (it == normal.nodes.begin() || it + 1 == normal.nodes.end()) {
    throw NoRouteError("failed node is an endpoint");
  }
  std::vector<char> blocked(topology.node_count(), 0);
  blocked[failed.index()] = 1;
  Route prefix{{normal.nodes.begin(), it - 1}};
  for (NodeId v : prefix.nodes) blocked[v.index()] = 1;
  if (auto tail = bfs_route(topology, *(it - 1), dst, blocked)) {
    prefix.nodes.insert(prefix.nodes.end(), tail->nodes.begin(), tail->nodes.end());
    return prefix;
  }
  std::vector<char> only_failed(topology.node_count(), 0);
  only_failed[failed.index()] = 1;
  if (auto full = bfs_route(topology, src, dst, only_failed)) return *full;
  throw NoRouteError(fmt::format("no route from {} to {} avoids node {}", src.value, dst.value, failed.value));
}

std::string to_string(RoutingMode mode) {
  switch (mode) {
    case RoutingMode::Ecmp: return "ecmp";
    case RoutingMode::Random: return "random";
    case RoutingMode::Specialized: return "specialized";
  }
  return "random";
}

RoutingMode parse_routing_mode(const std::string& text) {
  if (text == "ecmp") return RoutingMode::Ecmp;
  if (text == "random") return RoutingMode::Random;
  if (text == "specialized") return RoutingMode::Specialized;
  throw std::invalid_argument(fmt::format("unknown routing mode '{}' (ecmp, random, specialized)", text));
}

bool has_specialized_routing(const Topology& topology) {
  return is_fat_tree_family(topology) || std::holds_alternative<DCellParams>(topology.params()) ||
         std::holds_alternative<BCubeParams>(topology.params());
}

Route specialized_route(const Topology& topology, NodeId src, NodeId dst, Rng& rng) {
  if (is_fat_tree_family(topology)) return fat_tree_route(topology, src, dst, rng);
  if (std::holds_alternative<DCellParams>(topology.params())) return dcell_route(topology, src, dst);
  if (std::holds_alternative<BCubeParams>(topology.params())) return bcube_route(topology, src, dst);
  throw std::invalid_argument(fmt::format("no specialized routing for {}", family_name(topology.params())));
}

RouteCheck check_route(const Topology& topology, const Route& route, NodeId src, NodeId dst) {
  auto fail = [](std::string why) { return RouteCheck{false, std::move(why)}; };
  if (route.nodes.size() < 2) return fail("route has fewer than two nodes");
  if (route.nodes.front() != src || route.nodes.back() != dst) return fail("wrong endpoints");
  if (!topology.node(src).is_host() || !topology.node(dst).is_host())
    return fail("endpoints are not hosts");
  std::vector<char> seen(topology.node_count(), 0);
  for (std::size_t i = 0; i < route.nodes.size(); ++i) {
    const NodeId v = route.nodes[i];
    if (v.index() >= topology.node_count()) return fail(fmt::format("node {} out of range", v.value));
    if (seen[v.index()]) return fail(fmt::format("node {} repeats", v.value));
    seen[v.index()] = 1;
    if (i > 0 && !topology.adjacent(route.nodes[i - 1], v))
      return fail(fmt::format("{} and {} are not adjacent", route.nodes[i - 1].value, v.value));
    if (i > 0 && i + 1 < route.nodes.size() && !topology.can_forward(v))
      return fail(fmt::format("node {} may not forward", v.value));
  }
  return {};
}

}  // namespace dcn
