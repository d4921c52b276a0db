#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcn/routing.hpp"
#include "dcn/topology.hpp"
#include "dcn/traffic.hpp"

namespace dcn {

struct Flow {
  NodeId src;
  NodeId dst;
  Route route;
  double rate = 0;
};

struct FlowAllocation {
  std::vector<Flow> flows;
  /// Unused capacity per directed channel (link * 2 + direction).
  std::vector<double> residual;
};

/// Directed channel ids crossed by a route, in order.
std::vector<std::uint32_t> route_channels(const Topology& topology, const Route& route);

/// Progressive filling over directed channels: all unfrozen flows grow at the
/// same pace until some channel fills, its flows freeze, and so on. Routes
/// must be valid; a flow whose route crosses no channel is rejected.
FlowAllocation max_min_fair(const Topology& topology, std::vector<Flow> flows);

enum class FlowRouting {
  EcmpHash,            // ecmp_route with a per-run salt
  Specialized,         // fat tree / DCell / BCube algorithms
  ConflictMinimizing,  // shortest paths chosen to spread channel load
};
std::string to_string(FlowRouting r);
FlowRouting parse_flow_routing(const std::string& text);

struct BisectionTestResult {
  FlowAllocation allocation;
  std::vector<double> normalized_pct;  // per flow: rate / source access capacity * 100
  double mean_pct = 0;
  double min_pct = 0;
};

/// One flow per participating host towards its pattern destination, routed,
/// then allocated max-min fairly. The pattern must map hosts one to one;
/// uniform random is rejected. `seed` salts hashing and random uplinks.
BisectionTestResult bisection_test(const Topology& topology, FlowRouting routing,
                                   const TrafficPattern& pattern = TrafficPattern::complement(),
                                   std::uint64_t seed = 1);

/// Picks one shortest path per (src, dst) pair, greedily minimising the
/// worst channel load and then improving flow by flow.
std::vector<Route> conflict_minimizing_routes(const Topology& topology, const RoutingTable& table,
                                              const std::vector<std::pair<NodeId, NodeId>>& pairs);

std::string flow_csv_header();
std::string to_csv_rows(const std::string& topology, const TrafficPattern& pattern,
                        const BisectionTestResult& result);

}  // namespace dcn
