#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fmt/core.h>

#include "dcn/builders.hpp"
#include "dcn/errors.hpp"
#include "dcn/rng.hpp"

namespace dcn {
namespace {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

Edge ordered(std::uint32_t a, std::uint32_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Switch-only multigraph-free working graph used by the random builders.
struct SwitchGraph {
  std::vector<std::set<std::uint32_t>> adj;
  std::set<Edge> edges;

  explicit SwitchGraph(std::size_t n) : adj(n) {}

  bool has(std::uint32_t a, std::uint32_t b) const { return adj[a].count(b) != 0; }
  void add(std::uint32_t a, std::uint32_t b) {
    adj[a].insert(b);
    adj[b].insert(a);
    edges.insert(ordered(a, b));
  }
  void remove(std::uint32_t a, std::uint32_t b) {
    adj[a].erase(b);
    adj[b].erase(a);
    edges.erase(ordered(a, b));
  }
  bool connected() const {
    if (adj.size() <= 1) return true;
    std::vector<char> seen(adj.size(), 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    return reached == adj.size();
  }
};

// Random pairing of free ports. Returns false if it stalled beyond repair.
bool pair_ports(SwitchGraph& g, std::uint32_t r, Rng& rng) {
  const auto n = static_cast<std::uint32_t>(g.adj.size());
  auto free_of = [&](std::uint32_t s) { return r - static_cast<std::uint32_t>(g.adj[s].size()); };

  for (;;) {
    std::vector<std::uint32_t> open;
    for (std::uint32_t s = 0; s < n; ++s)
      if (free_of(s) > 0) open.push_back(s);
    if (open.empty()) return true;

    bool linked = false;
    if (open.size() >= 2) {
      for (int attempt = 0; attempt < 64 && !linked; ++attempt) {
        const auto a = open[rng.uniform(open.size())];
        const auto b = open[rng.uniform(open.size())];
        if (a != b && !g.has(a, b)) {
          g.add(a, b);
          linked = true;
        }
      }
      if (!linked) {
        std::vector<Edge> candidates;
        for (std::size_t i = 0; i < open.size(); ++i)
          for (std::size_t j = i + 1; j < open.size(); ++j)
            if (!g.has(open[i], open[j])) candidates.push_back({open[i], open[j]});
        if (!candidates.empty()) {
          const auto& e = candidates[rng.uniform(candidates.size())];
          g.add(e.first, e.second);
          linked = true;
        }
      }
    }
    if (linked) continue;

    // Stalled: remaining free ports cannot pair directly. Split an existing
    // link (x,y) and hook both ends onto the stuck switches.
    std::uint32_t s1 = open[0];
    std::uint32_t s2 = open.size() > 1 ? open[1] : open[0];
    if (free_of(s1) < 2 && s1 == s2) return false;
    if (open.size() > 1 && free_of(s1) >= 2) s2 = s1;
    std::vector<Edge> splittable;
    for (const auto& [x, y] : g.edges) {
      if (x == s1 || x == s2 || y == s1 || y == s2) continue;
      if (!g.has(s1, x) && !g.has(s2, y)) splittable.push_back({x, y});
      if (!g.has(s1, y) && !g.has(s2, x)) splittable.push_back({y, x});
    }
    if (splittable.empty()) return false;
    const auto [x, y] = splittable[rng.uniform(splittable.size())];
    g.remove(x, y);
    g.add(s1, x);
    g.add(s2, y);
  }
}

Topology assemble_jellyfish(const SwitchGraph& g, const std::vector<std::uint32_t>& hosts_per,
                            const std::vector<std::uint32_t>& radix, JellyfishParams params) {
  TopologyBuilder b;
  const auto n = static_cast<std::uint32_t>(g.adj.size());
  std::vector<NodeId> first_host(n);
  for (std::uint32_t s = 0; s < n; ++s)
    for (std::uint32_t h = 0; h < hosts_per[s]; ++h) {
      auto id = b.add_host(1, {{s, h}, AddressScheme::Flat}, fmt::format("host-{}-{}", s, h));
      if (h == 0) first_host[s] = id;
    }
  const std::size_t base = b.node_count();
  for (std::uint32_t s = 0; s < n; ++s)
    b.add_switch(radix[s], {{s}, AddressScheme::Flat}, fmt::format("switch-{}", s));
  for (std::uint32_t s = 0; s < n; ++s)
    for (std::uint32_t h = 0; h < hosts_per[s]; ++h)
      b.add_link(NodeId(first_host[s].index() + h), NodeId(base + s));
  for (const auto& [x, y] : g.edges) b.add_link(NodeId(base + x), NodeId(base + y));
  return std::move(b).build(taxonomy::jellyfish(), params);
}

}  // namespace

Topology build_jellyfish(const JellyfishParams& p, const BuildOptions& options) {
  if (p.num_switches < 1 || p.ports < 1) throw std::invalid_argument("jellyfish counts must be positive");
  if (p.r >= p.ports) throw std::invalid_argument(fmt::format("jellyfish needs r < ports, got r={} ports={}", p.r, p.ports));
  if ((std::uint64_t{p.num_switches} * p.r) % 2 != 0)
    throw std::invalid_argument("jellyfish needs num_switches * r even");
  if (p.num_switches < p.r + 1)
    throw std::invalid_argument(fmt::format("jellyfish needs at least r+1={} switches", p.r + 1));
  if (p.num_switches > 1 && p.r == 0)
    throw std::invalid_argument("jellyfish with r=0 and several switches is disconnected");
  if (p.num_switches > 2 && p.r == 1)
    throw std::invalid_argument("jellyfish with r=1 and more than two switches is disconnected");
  const std::uint32_t hosts_per = p.ports - p.r;
  if (std::uint64_t{p.num_switches} * (hosts_per + 1) > options.size_cap)
    throw SizeCapExceeded(std::uint64_t{p.num_switches} * (hosts_per + 1), options.size_cap);

  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Rng rng(derive_seed(p.seed, attempt));
    SwitchGraph g(p.num_switches);
    if (!pair_ports(g, p.r, rng) || !g.connected()) continue;
    return assemble_jellyfish(g, std::vector<std::uint32_t>(p.num_switches, hosts_per),
                              std::vector<std::uint32_t>(p.num_switches, p.ports), p);
  }
  throw Error(fmt::format("jellyfish({}, {}, {}) failed to produce a connected graph",
                          p.num_switches, p.ports, p.r));
}

Topology expand_jellyfish(const Topology& t, std::uint32_t ports, std::uint32_t r,
                          std::uint64_t seed, const BuildOptions& options) {
  const auto* prev = std::get_if<JellyfishParams>(&t.params());
  if (!prev) throw std::invalid_argument("expand_jellyfish needs a jellyfish topology");
  if (r < 2 || r >= ports) throw std::invalid_argument("expansion needs 2 <= r < ports");

  const auto n = static_cast<std::uint32_t>(t.switch_count());
  if (t.node_count() + 1 + (ports - r) > options.size_cap)
    throw SizeCapExceeded(t.node_count() + 1 + (ports - r), options.size_cap);
  std::vector<std::uint32_t> local(t.node_count(), UINT32_MAX);
  for (std::uint32_t s = 0; s < n; ++s) local[t.switches()[s].index()] = s;

  SwitchGraph g(n + 1);
  std::vector<std::uint32_t> hosts_per(n + 1, 0);
  std::vector<std::uint32_t> radix(n + 1, ports);
  for (std::uint32_t s = 0; s < n; ++s) radix[s] = t.node(t.switches()[s]).radix;
  for (const Link& link : t.links()) {
    const auto la = local[link.a.index()];
    const auto lb = local[link.b.index()];
    if (la != UINT32_MAX && lb != UINT32_MAX) g.add(la, lb);
    else if (la != UINT32_MAX) ++hosts_per[la];
    else if (lb != UINT32_MAX) ++hosts_per[lb];
  }
  hosts_per[n] = ports - r;

  Rng rng(derive_seed(seed, n));
  while (g.adj[n].size() + 2 <= r) {
    std::vector<Edge> removable;
    for (const auto& [x, y] : g.edges)
      if (x != n && y != n && !g.has(x, n) && !g.has(y, n)) removable.push_back({x, y});
    if (removable.empty()) {
      if (g.adj[n].size() >= 2) break;
      throw Error("no removable link left for jellyfish expansion");
    }
    const auto [x, y] = removable[rng.uniform(removable.size())];
    g.remove(x, y);
    g.add(x, n);
    g.add(y, n);
  }

  JellyfishParams next = *prev;
  next.num_switches = n + 1;
  return assemble_jellyfish(g, hosts_per, radix, next);
}

// Capped preferential growth. Nodes join in a seeded order (first a switch);
// each newcomer links to distinct earlier nodes that still have a free port,
// chosen with probability proportional to degree + 1.
Topology build_scafida(const ScafidaParams& p, const BuildOptions& options) {
  if (p.num_switches < 1) throw std::invalid_argument("scafida needs at least one switch");
  if (p.max_degree < 2) throw std::invalid_argument("scafida needs max_degree >= 2");
  if (p.host_ports < 1 || p.links_per_node < 1)
    throw std::invalid_argument("scafida host_ports and links_per_node must be positive");
  const std::uint64_t total = std::uint64_t{p.num_switches} + p.num_hosts;
  if (total > options.size_cap) throw SizeCapExceeded(total, options.size_cap);

  const auto n = static_cast<std::uint32_t>(total);
  // Growth-time ids: switches [0, S), hosts [S, n).
  auto cap = [&](std::uint32_t v) { return v < p.num_switches ? p.max_degree : p.host_ports; };

  Rng rng(p.seed);
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::swap(order[0], order[rng.uniform(p.num_switches)]);
  auto rest = std::vector<std::uint32_t>(order.begin() + 1, order.end());
  rng.shuffle(rest);
  std::copy(rest.begin(), rest.end(), order.begin() + 1);

  std::vector<std::uint32_t> degree(n, 0);
  std::vector<Edge> edges;
  std::vector<std::uint32_t> present;
  std::uint64_t free_ports = 0;  // among present nodes
  auto join = [&](std::uint32_t v) {
    const std::uint32_t want = std::min(p.links_per_node, cap(v));
    std::vector<std::uint32_t> open;
    for (auto u : present)
      if (degree[u] < cap(u)) open.push_back(u);
    if (!present.empty() && open.empty())
      throw Error(fmt::format("scafida ran out of free ports after {} nodes", present.size()));
    for (std::uint32_t m = 0; m < want && !open.empty(); ++m) {
      double total_w = 0;
      for (auto u : open) total_w += degree[u] + 1.0;
      double x = rng.real() * total_w;
      std::size_t pick = open.size() - 1;
      for (std::size_t i = 0; i < open.size(); ++i) {
        x -= degree[open[i]] + 1.0;
        if (x < 0) {
          pick = i;
          break;
        }
      }
      const auto u = open[pick];
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
      edges.push_back({u, v});
      ++degree[u];
      ++degree[v];
      free_ports -= 1;
    }
    free_ports += cap(v) - degree[v];
    present.push_back(v);
  };

  // A host waits while taking its links would leave no port for the
  // switches still to come.
  std::uint32_t switches_left = p.num_switches;
  std::vector<std::uint32_t> waiting;
  auto host_fits = [&](std::uint32_t v) {
    return switches_left == 0 || free_ports > std::min(p.links_per_node, cap(v));
  };
  for (std::uint32_t v : order) {
    if (v >= p.num_switches) {
      if (waiting.empty() && host_fits(v)) join(v);
      else waiting.push_back(v);
      continue;
    }
    join(v);
    --switches_left;
    std::size_t done = 0;
    while (done < waiting.size() && host_fits(waiting[done])) join(waiting[done++]);
    waiting.erase(waiting.begin(), waiting.begin() + static_cast<std::ptrdiff_t>(done));
  }
  for (std::uint32_t v : waiting) join(v);

  // Relabel hosts first.
  std::vector<std::uint32_t> id(n);
  for (std::uint32_t h = 0; h < p.num_hosts; ++h) id[p.num_switches + h] = h;
  for (std::uint32_t s = 0; s < p.num_switches; ++s) id[s] = p.num_hosts + s;

  TopologyBuilder b;
  for (std::uint32_t h = 0; h < p.num_hosts; ++h)
    b.add_host(p.host_ports, {{h}, AddressScheme::Flat}, fmt::format("host-{}", h));
  for (std::uint32_t s = 0; s < p.num_switches; ++s)
    b.add_switch(p.max_degree, {}, fmt::format("switch-{}", s));
  for (auto [u, v] : edges) b.add_link(NodeId(id[u]), NodeId(id[v]));
  return std::move(b).build(taxonomy::scafida(), p);
}

}  // namespace dcn
