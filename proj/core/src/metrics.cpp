#include "dcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

#include "dcn/edge_list.hpp"
#include "dcn/errors.hpp"
#include "dcn/rng.hpp"
#include "maxflow.hpp"

namespace dcn {
namespace {

constexpr double kInf = 1e18;
constexpr double kEps = 1e-9;

void require_hosts(const Topology& t, std::size_t n) {
  if (t.host_count() < n) {
    throw std::invalid_argument(fmt::format("need at least {} hosts, topology has {}", n, t.host_count()));
  }
}

std::vector<std::uint32_t> bfs_masked(const Topology& t, NodeId src, const std::vector<char>* removed) {
  std::vector<std::uint32_t> dist(t.node_count(), kUnreachable);
  std::deque<NodeId> q{src};
  dist[src.index()] = 0;
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop_front();
    if (v != src && !t.can_forward(v)) continue;
    for (const auto& inc : t.neighbors(v)) {
      const auto w = inc.neighbor.index();
      if (dist[w] != kUnreachable || (removed && (*removed)[w])) continue;
      dist[w] = dist[v.index()] + 1;
      q.push_back(inc.neighbor);
    }
  }
  return dist;
}

// Min cut between the host sets of a bipartition. `in_a[i]` refers to host
// index i. Optionally returns the source side of the cut.
double host_partition_cut(const Topology& t, const std::vector<char>& in_a,
                          std::vector<char>* side = nullptr) {
  const auto n = static_cast<std::uint32_t>(t.node_count());
  detail::MaxFlow flow(n + 2);
  for (const Link& l : t.links()) flow.add_undirected(l.a.value, l.b.value, l.capacity);
  for (std::size_t i = 0; i < t.host_count(); ++i) {
    if (in_a[i]) flow.add_edge(n, t.host(i).value, kInf);
    else flow.add_edge(t.host(i).value, n + 1, kInf);
  }
  const double value = flow.run(n, n + 1);
  if (side) {
    *side = flow.source_side(n);
    side->resize(n);
  }
  return value;
}

// Node-level partition refinement for the heuristic bisection.
class LocalSearch {
 public:
  LocalSearch(const Topology& t, std::vector<char> side) : t_(t), side_(std::move(side)), d_(t.node_count(), 0) {
    for (const Link& l : t_.links()) {
      const double c = side_[l.a.index()] != side_[l.b.index()] ? l.capacity : -l.capacity;
      d_[l.a.index()] += c;
      d_[l.b.index()] += c;
    }
  }

  const std::vector<char>& side() const { return side_; }

  void run() {
    for (bool improved = true; improved;) {
      improved = false;
      for (NodeId s : t_.switches()) {
        if (d_[s.index()] > kEps) {
          move(s);
          improved = true;
        }
      }
      if (try_swap()) improved = true;
    }
  }

 private:
  void move(NodeId v) {
    side_[v.index()] ^= 1;
    d_[v.index()] = -d_[v.index()];
    for (const auto& inc : t_.neighbors(v)) {
      const double c = t_.link(inc.link).capacity;
      d_[inc.neighbor.index()] += side_[inc.neighbor.index()] == side_[v.index()] ? -2 * c : 2 * c;
    }
  }

  bool try_swap() {
    constexpr std::size_t kTop = 8;
    std::vector<NodeId> a, b;
    for (NodeId h : t_.hosts()) (side_[h.index()] ? a : b).push_back(h);
    auto by_gain = [&](NodeId x, NodeId y) {
      if (d_[x.index()] != d_[y.index()]) return d_[x.index()] > d_[y.index()];
      return x < y;
    };
    const auto ka = std::min(kTop, a.size());
    const auto kb = std::min(kTop, b.size());
    std::partial_sort(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(ka), a.end(), by_gain);
    std::partial_sort(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(kb), b.end(), by_gain);
    double best = kEps;
    NodeId bx, by;
    bool found = false;
    for (std::size_t i = 0; i < ka; ++i) {
      for (std::size_t j = 0; j < kb; ++j) {
        double gain = d_[a[i].index()] + d_[b[j].index()];
        if (auto l = t_.find_link(a[i], b[j])) gain -= 2 * t_.link(*l).capacity;
        if (gain > best) {
          best = gain;
          bx = a[i];
          by = b[j];
          found = true;
        }
      }
    }
    if (!found) return false;
    move(bx);
    move(by);
    return true;
  }

  const Topology& t_;
  std::vector<char> side_;
  std::vector<double> d_;
};

std::vector<char> initial_partition(const Topology& t, unsigned restart, Rng& rng) {
  const std::size_t h = t.host_count();
  const std::size_t want = h / 2;
  std::vector<char> side(t.node_count(), 0);
  if (restart % 2 == 0) {
    std::vector<std::size_t> order(h);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (std::size_t i = 0; i < want; ++i) side[t.host(order[i]).index()] = 1;
    for (NodeId s : t.switches()) side[s.index()] = static_cast<char>(rng.uniform(2));
    return side;
  }
  // Grow a region by BFS from a random host until it holds half the hosts.
  std::vector<char> seen(t.node_count(), 0);
  std::deque<NodeId> q{t.host(rng.uniform(h))};
  seen[q.front().index()] = 1;
  std::size_t taken = 0;
  while (!q.empty() && taken < want) {
    const NodeId v = q.front();
    q.pop_front();
    side[v.index()] = 1;
    if (t.node(v).is_host()) ++taken;
    for (const auto& inc : t.neighbors(v)) {
      if (!seen[inc.neighbor.index()]) {
        seen[inc.neighbor.index()] = 1;
        q.push_back(inc.neighbor);
      }
    }
  }
  // Unreached hosts can leave the count short on odd shapes; top it up.
  for (std::size_t i = 0; i < h && taken < want; ++i) {
    if (!side[t.host(i).index()]) {
      side[t.host(i).index()] = 1;
      ++taken;
    }
  }
  return side;
}

std::vector<char> hosts_of(const Topology& t, const std::vector<char>& node_side) {
  std::vector<char> in_a(t.host_count());
  for (std::size_t i = 0; i < t.host_count(); ++i) in_a[i] = node_side[t.host(i).index()];
  return in_a;
}

std::uint32_t vdp_masked(const Topology& t, NodeId a, NodeId b, const std::vector<char>* removed) {
  // Node v splits into in = 2v, out = 2v+1.
  const auto n = static_cast<std::uint32_t>(t.node_count());
  detail::MaxFlow flow(2 * n);
  for (std::uint32_t v = 0; v < n; ++v) {
    const bool gone = removed && (*removed)[v];
    const bool interior_ok = !gone && t.can_forward(NodeId(v));
    const NodeId id(v);
    double cap = interior_ok ? 1.0 : 0.0;
    if (id == a || id == b) cap = kInf;
    flow.add_edge(2 * v, 2 * v + 1, cap);
  }
  for (const Link& l : t.links()) {
    if (removed && ((*removed)[l.a.index()] || (*removed)[l.b.index()])) continue;
    flow.add_edge(2 * l.a.value + 1, 2 * l.b.value, 1.0);
    flow.add_edge(2 * l.b.value + 1, 2 * l.a.value, 1.0);
  }
  return static_cast<std::uint32_t>(std::lround(flow.run(2 * a.value + 1, 2 * b.value, kInf)));
}

}  // namespace

std::vector<std::uint32_t> bfs_distances(const Topology& topology, NodeId src) {
  return bfs_masked(topology, src, nullptr);
}

std::uint32_t host_diameter(const Topology& topology) {
  require_hosts(topology, 2);
  std::uint32_t best = 0;
  for (NodeId h : topology.hosts()) {
    const auto dist = bfs_distances(topology, h);
    for (NodeId g : topology.hosts()) {
      if (dist[g.index()] == kUnreachable) {
        throw DisconnectedError(fmt::format("hosts {} and {} are disconnected", h.value, g.value));
      }
      best = std::max(best, dist[g.index()]);
    }
  }
  return best;
}

double avg_host_path(const Topology& topology) {
  require_hosts(topology, 2);
  std::uint64_t sum = 0;
  const auto hosts = topology.hosts();
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    const auto dist = bfs_distances(topology, hosts[i]);
    for (std::size_t j = i + 1; j < hosts.size(); ++j) {
      if (dist[hosts[j].index()] == kUnreachable) {
        throw DisconnectedError(
            fmt::format("hosts {} and {} are disconnected", hosts[i].value, hosts[j].value));
      }
      sum += dist[hosts[j].index()];
    }
  }
  const double pairs = static_cast<double>(hosts.size()) * (hosts.size() - 1) / 2.0;
  return static_cast<double>(sum) / pairs;
}

double bisection_bandwidth_exact(const Topology& topology) {
  const std::size_t h = topology.host_count();
  require_hosts(topology, 2);
  if (h > kExactBisectionMaxHosts) {
    throw std::invalid_argument(fmt::format(
        "exact bisection is limited to {} hosts (topology has {}); use the heuristic",
        kExactBisectionMaxHosts, h));
  }
  const std::size_t k = h / 2;
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> in_a(h);
  // Gosper's hack over k-subsets. With an even split, host 0 may be pinned to
  // side A since the complement gives the same cut.
  const std::uint32_t limit = 1u << h;
  for (std::uint32_t mask = (1u << k) - 1; mask < limit;) {
    if (h % 2 == 1 || (mask & 1u)) {
      for (std::size_t i = 0; i < h; ++i) in_a[i] = static_cast<char>((mask >> i) & 1u);
      best = std::min(best, host_partition_cut(topology, in_a));
    }
    const std::uint32_t c = mask & (0u - mask);
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return best;
}

constexpr int kKicks = 24;

double bisection_bandwidth_heuristic(const Topology& topology, unsigned restarts,
                                     std::uint64_t seed) {
  require_hosts(topology, 2);
  double best = std::numeric_limits<double>::infinity();
  for (unsigned r = 0; r < std::max(1u, restarts); ++r) {
    Rng rng(derive_seed(seed, r));
    std::vector<char> side = initial_partition(topology, r, rng);
    std::vector<char> in_a = hosts_of(topology, side);
    double value = host_partition_cut(topology, in_a, &side);
    auto descend = [&] {
      for (int round = 0; round < 64; ++round) {
        // The max-flow source side keeps every host where in_a put it.
        LocalSearch ls(topology, side);
        ls.run();
        std::vector<char> next_a = hosts_of(topology, ls.side());
        std::vector<char> next_side;
        const double next = host_partition_cut(topology, next_a, &next_side);
        if (next >= value - kEps) break;
        value = next;
        in_a = std::move(next_a);
        side = std::move(next_side);
      }
    };
    descend();
    // Kick: swap a couple of host pairs and descend again; equal cuts are
    // accepted so the search can drift across plateaus.
    for (int kick = 0; kick < kKicks; ++kick) {
      const double kept_value = value;
      const auto kept_a = in_a;
      const auto kept_side = side;
      for (int k = 0; k < 2; ++k) {
        std::vector<std::size_t> a, b;
        for (std::size_t i = 0; i < in_a.size(); ++i) (in_a[i] ? a : b).push_back(i);
        if (a.empty() || b.empty()) break;
        std::swap(in_a[a[rng.uniform(a.size())]], in_a[b[rng.uniform(b.size())]]);
      }
      value = host_partition_cut(topology, in_a, &side);
      descend();
      if (value > kept_value + kEps) {
        value = kept_value;
        in_a = kept_a;
        side = kept_side;
      }
    }
    best = std::min(best, value);
  }
  return best;
}

std::string to_string(BisectionMethod m) {
  return m == BisectionMethod::Exact ? "exact" : "heuristic";
}

Bisection bisection_bandwidth(const Topology& topology, unsigned restarts, std::uint64_t seed) {
  if (topology.host_count() <= kExactBisectionMaxHosts) {
    return {bisection_bandwidth_exact(topology), BisectionMethod::Exact};
  }
  return {bisection_bandwidth_heuristic(topology, restarts, seed), BisectionMethod::Heuristic};
}

double host_access_capacity(const Topology& topology) {
  double total = 0;
  for (NodeId h : topology.hosts()) {
    double to_switch = 0, all = 0;
    for (const auto& inc : topology.neighbors(h)) {
      const double c = topology.link(inc.link).capacity;
      all += c;
      if (topology.node(inc.neighbor).is_switch()) to_switch += c;
    }
    total += to_switch > 0 ? to_switch : all;
  }
  return total;
}

double oversubscription_ratio(const Topology& topology, double bisection) {
  if (!(bisection > 0)) throw std::invalid_argument("bisection bandwidth must be positive");
  return host_access_capacity(topology) / 2.0 / bisection;
}

double oversubscription_ratio(const Topology& topology) {
  return oversubscription_ratio(topology, bisection_bandwidth(topology).value);
}

std::uint32_t vertex_disjoint_paths(const Topology& topology, NodeId a, NodeId b) {
  if (a == b) throw std::invalid_argument("vertex_disjoint_paths needs distinct endpoints");
  return vdp_masked(topology, a, b, nullptr);
}

std::pair<double, double> two_path_fraction(const Topology& t, const std::vector<char>& removed) {
  const std::size_t h = t.host_count();
  if (h < 2) return {0.0, 0.0};
  const double pairs = static_cast<double>(h) * (h - 1) / 2.0;

  bool blocks_valid = true;
  for (NodeId v : t.hosts())
    if (!t.can_forward(v) && t.degree(v) > 1) blocks_valid = false;

  if (!blocks_valid) {
    // Hosts with several links that may not relay: count pair by pair.
    std::size_t two = 0, conn = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const auto dist = bfs_masked(t, t.host(i), &removed);
      for (std::size_t j = i + 1; j < h; ++j) {
        if (dist[t.host(j).index()] == kUnreachable) continue;
        ++conn;
        if (vdp_masked(t, t.host(i), t.host(j), &removed) >= 2) ++two;
      }
    }
    return {two / pairs, conn / pairs};
  }

  const std::size_t n = t.node_count();
  // Connected components for the connected fraction.
  std::vector<std::uint32_t> comp(n, kUnreachable);
  std::vector<std::size_t> comp_hosts;
  for (std::size_t s = 0; s < n; ++s) {
    if (removed[s] || comp[s] != kUnreachable) continue;
    const auto c = static_cast<std::uint32_t>(comp_hosts.size());
    comp_hosts.push_back(0);
    std::vector<std::size_t> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      if (t.nodes()[v].is_host()) ++comp_hosts[c];
      for (const auto& inc : t.neighbors(NodeId(v))) {
        const auto w = inc.neighbor.index();
        if (!removed[w] && comp[w] == kUnreachable) {
          comp[w] = c;
          stack.push_back(w);
        }
      }
    }
  }
  double connected = 0;
  for (auto c : comp_hosts) connected += static_cast<double>(c) * (c - 1) / 2.0;

  // Biconnected blocks (iterative Hopcroft-Tarjan). Two hosts have two
  // internally disjoint paths iff they share a block with >= 3 nodes.
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<std::uint32_t> edge_stack;
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t block_id = 0;
  double two = 0;
  int timer = 0;
  struct Frame {
    std::uint32_t v;
    std::uint32_t parent_link;
    std::size_t it;
  };
  std::vector<Frame> frames;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (removed[root] || disc[root] >= 0) continue;
    disc[root] = low[root] = timer++;
    frames.push_back({root, UINT32_MAX, 0});
    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto adj = t.neighbors(NodeId(f.v));
      if (f.it < adj.size()) {
        const auto inc = adj[f.it++];
        const auto w = inc.neighbor.value;
        if (removed[w] || inc.link == f.parent_link) continue;
        if (disc[w] < 0) {
          edge_stack.push_back(inc.link);
          disc[w] = low[w] = timer++;
          frames.push_back({w, inc.link, 0});
        } else if (disc[w] < disc[f.v]) {
          edge_stack.push_back(inc.link);
          low[f.v] = std::min(low[f.v], disc[w]);
        }
        continue;
      }
      const Frame done = f;
      frames.pop_back();
      if (frames.empty()) break;
      const auto p = frames.back().v;
      low[p] = std::min(low[p], low[done.v]);
      if (low[done.v] >= disc[p]) {
        ++block_id;
        std::size_t size = 0, hosts = 0;
        auto mark = [&](NodeId x) {
          if (stamp[x.index()] == block_id) return;
          stamp[x.index()] = block_id;
          ++size;
          if (t.node(x).is_host()) ++hosts;
        };
        for (;;) {
          const auto e = edge_stack.back();
          edge_stack.pop_back();
          mark(t.link(e).a);
          mark(t.link(e).b);
          if (e == done.parent_link) break;
        }
        if (size >= 3) two += static_cast<double>(hosts) * (hosts - 1) / 2.0;
      }
    }
  }
  return {two / pairs, connected / pairs};
}

FailureStats failure_experiment(const Topology& topology, double fail_fraction,
                                std::size_t trials, std::uint64_t seed) {
  if (!(fail_fraction >= 0.0 && fail_fraction < 1.0)) {
    throw std::invalid_argument("fail_fraction must lie in [0, 1)");
  }
  FailureStats stats;
  stats.trials = trials;
  const auto switches = topology.switches();
  stats.failed_switches = static_cast<std::size_t>(std::floor(fail_fraction * switches.size()));
  double sum_two = 0, sum_conn = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, trial));
    std::vector<NodeId> pool(switches.begin(), switches.end());
    rng.shuffle(pool);
    std::vector<char> removed(topology.node_count(), 0);
    for (std::size_t i = 0; i < stats.failed_switches; ++i) removed[pool[i].index()] = 1;
    const auto [two, conn] = two_path_fraction(topology, removed);
    stats.per_trial_two_path.push_back(two);
    sum_two += two;
    sum_conn += conn;
  }
  if (trials > 0) {
    stats.two_path_fraction = sum_two / static_cast<double>(trials);
    stats.connected_fraction = sum_conn / static_cast<double>(trials);
  }
  return stats;
}

MetricsReport compute_metrics(const Topology& topology, std::string name, unsigned restarts,
                              std::uint64_t seed) {
  MetricsReport r;
  r.topology = std::move(name);
  r.hosts = topology.host_count();
  r.switches = topology.switch_count();
  r.diameter = host_diameter(topology);
  r.avg_path = avg_host_path(topology);
  const Bisection b = bisection_bandwidth(topology, restarts, seed);
  r.bisection = b.value;
  r.method = b.method;
  r.oversub = oversubscription_ratio(topology, b.value);
  return r;
}

std::string metrics_csv_header() {
  return "topology,hosts,switches,diameter,avg_path,bisection,oversub,method";
}

std::string to_csv_row(const MetricsReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{}", r.topology, r.hosts, r.switches, r.diameter,
                     format_real(r.avg_path), format_real(r.bisection), format_real(r.oversub),
                     to_string(r.method));
}

}  // namespace dcn
