#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcn/topology.hpp"

namespace dcn {

inline constexpr std::uint32_t kUnreachable = UINT32_MAX;

/// BFS hop counts (links) from `src`. Nodes that may not forward (hosts of a
/// switch-centric topology) are reached but never expanded.
std::vector<std::uint32_t> bfs_distances(const Topology& topology, NodeId src);

/// Longest shortest path between two hosts, in links. Throws
/// DisconnectedError if some host pair is unreachable.
std::uint32_t host_diameter(const Topology& topology);

/// Mean shortest-path length over unordered host pairs.
double avg_host_path(const Topology& topology);

inline constexpr std::size_t kExactBisectionMaxHosts = 16;

/// Minimum over balanced host bipartitions of the min cut between the two
/// host sets. Switches fall on whichever side minimises the cut. Throws
/// std::invalid_argument above kExactBisectionMaxHosts hosts.
double bisection_bandwidth_exact(const Topology& topology);

/// Best balanced cut found by local search from `restarts` seeded starting
/// partitions. Every returned value is the exact min cut of some balanced host
/// bipartition, hence never below the true bisection bandwidth.
double bisection_bandwidth_heuristic(const Topology& topology, unsigned restarts,
                                     std::uint64_t seed);

enum class BisectionMethod { Exact, Heuristic };
std::string to_string(BisectionMethod m);

struct Bisection {
  double value = 0;
  BisectionMethod method = BisectionMethod::Exact;
};

/// Exact when the host count allows it, heuristic otherwise.
Bisection bisection_bandwidth(const Topology& topology, unsigned restarts = 8,
                              std::uint64_t seed = 1);

/// Sum over hosts of their access capacity: links to switches, or all links
/// for a host with no switch neighbour.
double host_access_capacity(const Topology& topology);

double oversubscription_ratio(const Topology& topology, double bisection);
double oversubscription_ratio(const Topology& topology);

/// Internally vertex-disjoint a-b paths (node-split unit max-flow).
std::uint32_t vertex_disjoint_paths(const Topology& topology, NodeId a, NodeId b);

struct FailureStats {
  std::size_t trials = 0;
  std::size_t failed_switches = 0;  // per trial
  double two_path_fraction = 0;     // mean over trials, over all host pairs
  double connected_fraction = 0;
  std::vector<double> per_trial_two_path;
};

/// Removes floor(fail_fraction * switches) random switches per trial and
/// measures how many host pairs keep two vertex-disjoint paths.
FailureStats failure_experiment(const Topology& topology, double fail_fraction,
                                std::size_t trials, std::uint64_t seed);

/// Fraction of host pairs with >= 2 vertex-disjoint paths, and fraction
/// connected, with the nodes flagged in `removed` deleted.
std::pair<double, double> two_path_fraction(const Topology& topology,
                                            const std::vector<char>& removed);

struct MetricsReport {
  std::string topology;
  std::size_t hosts = 0;
  std::size_t switches = 0;
  std::uint32_t diameter = 0;
  double avg_path = 0;
  double bisection = 0;
  double oversub = 0;
  BisectionMethod method = BisectionMethod::Exact;
};

MetricsReport compute_metrics(const Topology& topology, std::string name,
                              unsigned restarts = 8, std::uint64_t seed = 1);

std::string metrics_csv_header();
std::string to_csv_row(const MetricsReport& r);

}  // namespace dcn
