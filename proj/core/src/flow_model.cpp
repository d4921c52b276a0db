#include "dcn/flow_model.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "dcn/edge_list.hpp"
#include "dcn/metrics.hpp"

namespace dcn {
namespace {

constexpr double kEps = 1e-12;

std::uint32_t channel_of(const Topology& t, NodeId from, NodeId to) {
  const auto l = t.find_link(from, to);
  if (!l) throw std::invalid_argument(fmt::format("nodes {} and {} are not adjacent", from.value, to.value));
  return 2 * *l + (t.link(*l).a == from ? 0 : 1);
}

double access_capacity(const Topology& t, NodeId h) {
  double to_switch = 0, all = 0;
  for (const auto& inc : t.neighbors(h)) {
    const double c = t.link(inc.link).capacity;
    all += c;
    if (t.node(inc.neighbor).is_switch()) to_switch += c;
  }
  return to_switch > 0 ? to_switch : all;
}

void all_shortest(const Topology& t, const RoutingTable& table, std::size_t d, NodeId dst,
                  std::vector<NodeId>& stack, std::vector<Route>& out, std::size_t limit) {
  if (out.size() >= limit) return;
  const NodeId at = stack.back();
  if (at == dst) {
    out.push_back(Route{stack});
    return;
  }
  for (NodeId next : table.next_hops(at, d)) {
    stack.push_back(next);
    all_shortest(t, table, d, dst, stack, out, limit);
    stack.pop_back();
  }
}

}  // namespace

std::vector<std::uint32_t> route_channels(const Topology& topology, const Route& route) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 1; i < route.nodes.size(); ++i)
    out.push_back(channel_of(topology, route.nodes[i - 1], route.nodes[i]));
  return out;
}

FlowAllocation max_min_fair(const Topology& topology, std::vector<Flow> flows) {
  const std::size_t channels = topology.link_count() * 2;
  FlowAllocation alloc;
  alloc.residual.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) alloc.residual[c] = topology.link(static_cast<std::uint32_t>(c / 2)).capacity;

  std::vector<std::vector<std::uint32_t>> uses(flows.size());
  std::vector<std::uint32_t> active_on(channels, 0);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    uses[f] = route_channels(topology, flows[f].route);
    if (uses[f].empty()) throw std::invalid_argument("flow route crosses no link");
    flows[f].rate = 0;
    for (auto c : uses[f]) ++active_on[c];
  }
  std::vector<char> frozen(flows.size(), 0);
  std::size_t remaining = flows.size();
  while (remaining > 0) {
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < channels; ++c)
      if (active_on[c] > 0) step = std::min(step, alloc.residual[c] / active_on[c]);
    for (std::size_t f = 0; f < flows.size(); ++f)
      if (!frozen[f]) flows[f].rate += step;
    std::vector<char> full(channels, 0);
    for (std::size_t c = 0; c < channels; ++c) {
      if (active_on[c] == 0) continue;
      alloc.residual[c] -= step * active_on[c];
      const double cap = topology.link(static_cast<std::uint32_t>(c / 2)).capacity;
      if (alloc.residual[c] <= kEps * std::max(1.0, cap)) {
        alloc.residual[c] = std::max(0.0, alloc.residual[c]);
        full[c] = 1;
      }
    }
    for (std::size_t f = 0; f < flows.size(); ++f) {
      if (frozen[f]) continue;
      if (std::any_of(uses[f].begin(), uses[f].end(), [&](auto c) { return full[c] != 0; })) {
        frozen[f] = 1;
        --remaining;
        for (auto c : uses[f]) --active_on[c];
      }
    }
  }
  alloc.flows = std::move(flows);
  return alloc;
}

std::string to_string(FlowRouting r) {
  switch (r) {
    case FlowRouting::EcmpHash: return "ecmp";
    case FlowRouting::Specialized: return "specialized";
    case FlowRouting::ConflictMinimizing: return "conflict-min";
  }
  return "ecmp";
}

FlowRouting parse_flow_routing(const std::string& text) {
  if (text == "ecmp") return FlowRouting::EcmpHash;
  if (text == "specialized") return FlowRouting::Specialized;
  if (text == "conflict-min") return FlowRouting::ConflictMinimizing;
  throw std::invalid_argument(
      fmt::format("unknown flow routing '{}' (ecmp, specialized, conflict-min)", text));
}

std::vector<Route> conflict_minimizing_routes(const Topology& topology, const RoutingTable& table,
                                              const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  constexpr std::size_t kMaxPaths = 512;
  const std::size_t channels = topology.link_count() * 2;
  std::vector<double> cap(channels);
  for (std::size_t c = 0; c < channels; ++c) cap[c] = topology.link(static_cast<std::uint32_t>(c / 2)).capacity;

  std::vector<std::vector<std::vector<std::uint32_t>>> candidates(pairs.size());
  std::vector<std::vector<Route>> paths(pairs.size());
  for (std::size_t f = 0; f < pairs.size(); ++f) {
    const auto [s, d] = pairs[f];
    std::vector<NodeId> stack{s};
    all_shortest(topology, table, *topology.host_index(d), d, stack, paths[f], kMaxPaths);
    for (const Route& r : paths[f]) candidates[f].push_back(route_channels(topology, r));
  }

  std::vector<double> load(channels, 0.0);
  auto score = [&](const std::vector<std::uint32_t>& chans) {
    double worst = 0, sum = 0;
    for (auto c : chans) {
      const double x = (load[c] + 1.0) / cap[c];
      worst = std::max(worst, x);
      sum += x;
    }
    return std::pair{worst, sum};
  };
  auto best_for = [&](std::size_t f) {
    std::size_t best = 0;
    auto best_score = score(candidates[f][0]);
    for (std::size_t i = 1; i < candidates[f].size(); ++i) {
      const auto sc = score(candidates[f][i]);
      if (sc.first < best_score.first - 1e-12 ||
          (sc.first <= best_score.first + 1e-12 && sc.second < best_score.second - 1e-12)) {
        best = i;
        best_score = sc;
      }
    }
    return best;
  };
  auto apply = [&](std::size_t f, std::size_t i, double delta) {
    for (auto c : candidates[f][i]) load[c] += delta;
  };

  std::vector<std::size_t> choice(pairs.size());
  for (std::size_t f = 0; f < pairs.size(); ++f) {
    choice[f] = best_for(f);
    apply(f, choice[f], 1.0);
  }
  for (int pass = 0; pass < 50; ++pass) {
    bool changed = false;
    for (std::size_t f = 0; f < pairs.size(); ++f) {
      apply(f, choice[f], -1.0);
      const auto old_score = score(candidates[f][choice[f]]);
      const std::size_t next = best_for(f);
      const auto new_score = score(candidates[f][next]);
      if (next != choice[f] && (new_score.first < old_score.first - 1e-12 ||
                                (new_score.first <= old_score.first + 1e-12 &&
                                 new_score.second < old_score.second - 1e-12))) {
        choice[f] = next;
        changed = true;
      }
      apply(f, choice[f], 1.0);
    }
    if (!changed) break;
  }

  std::vector<Route> out;
  out.reserve(pairs.size());
  for (std::size_t f = 0; f < pairs.size(); ++f) out.push_back(paths[f][choice[f]]);
  return out;
}

BisectionTestResult bisection_test(const Topology& topology, FlowRouting routing,
                                   const TrafficPattern& pattern, std::uint64_t seed) {
  if (!pattern.deterministic()) {
    throw std::invalid_argument("bisection test needs a permutation pattern, not uniform random");
  }
  const auto participants = pattern_participants(pattern, topology.host_count());
  const auto n = static_cast<std::uint32_t>(participants.size());
  const std::uint32_t bits = pattern.needs_power_of_two() ? address_bits(n) : 0;
  Rng unused(0);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::vector<char> hit(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto d = pattern_destination(pattern, i, n, bits, unused);
    if (!d) continue;
    if (hit[*d]) throw std::invalid_argument("pattern is not a permutation");
    hit[*d] = 1;
    pairs.push_back({topology.host(participants[i]), topology.host(participants[*d])});
  }

  const RoutingTable table = compute_ecmp_tables(topology);
  std::vector<Flow> flows;
  if (routing == FlowRouting::ConflictMinimizing) {
    auto routes = conflict_minimizing_routes(topology, table, pairs);
    for (std::size_t f = 0; f < pairs.size(); ++f)
      flows.push_back({pairs[f].first, pairs[f].second, std::move(routes[f]), 0});
  } else {
    Rng rng(seed);
    for (const auto& [s, d] : pairs) {
      Route r = routing == FlowRouting::EcmpHash
                    ? ecmp_route(topology, table, s, d, std::uint64_t{s.value} * topology.node_count() + d.value, seed)
                    : specialized_route(topology, s, d, rng);
      flows.push_back({s, d, std::move(r), 0});
    }
  }

  BisectionTestResult result;
  result.allocation = max_min_fair(topology, std::move(flows));
  double sum = 0;
  result.min_pct = result.allocation.flows.empty() ? 0 : std::numeric_limits<double>::infinity();
  for (const Flow& f : result.allocation.flows) {
    const double pct = f.rate / access_capacity(topology, f.src) * 100.0;
    result.normalized_pct.push_back(pct);
    sum += pct;
    result.min_pct = std::min(result.min_pct, pct);
  }
  if (!result.normalized_pct.empty()) result.mean_pct = sum / static_cast<double>(result.normalized_pct.size());
  return result;
}

std::string flow_csv_header() { return "topology,pattern,flow_src,flow_dst,rate,normalized_pct"; }

std::string to_csv_rows(const std::string& topology, const TrafficPattern& pattern,
                        const BisectionTestResult& result) {
  std::string out;
  for (std::size_t i = 0; i < result.allocation.flows.size(); ++i) {
    const Flow& f = result.allocation.flows[i];
    out += fmt::format("{},{},{},{},{},{}\n", topology, to_string(pattern), f.src.value, f.dst.value,
                       format_real(f.rate), format_real(result.normalized_pct[i]));
  }
  return out;
}

}  // namespace dcn
