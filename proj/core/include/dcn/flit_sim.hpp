#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcn/routing.hpp"
#include "dcn/topology.hpp"
#include "dcn/traffic.hpp"

namespace dcn {

/// Simulator parameters. Defaults follow the garnet-style settings: 5-cycle
/// routers, 10-cycle links, 100 VCs, single-flit packets, drop and resend.
struct SimConfig {
  double injection_rate = 0.1;   // packets per host per cycle
  std::uint64_t sim_cycles = 10'000;
  std::optional<std::uint64_t> warmup_cycles;  // default: sim_cycles / 10
  std::uint32_t vcs_per_port = 100;
  std::uint32_t router_pipeline = 5;
  std::uint32_t link_latency = 10;  // 0 = use each link's own latency
  std::uint32_t vc_depth = 4;       // flits
  std::uint32_t flits_per_packet = 1;
  bool drop_and_retransmit = true;
  TrafficPattern pattern;
  std::uint64_t seed = 1;

  std::uint64_t warmup() const { return warmup_cycles.value_or(sim_cycles / 10); }
};

/// Throws std::invalid_argument naming the first bad field.
void validate(const SimConfig& config);

struct SimStats {
  // Whole-run totals; conservation holds exactly:
  // injected == received + in_flight + awaiting_retransmit.
  std::uint64_t packets_injected = 0;
  std::uint64_t packets_received = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t awaiting_retransmit = 0;
  std::uint64_t dropped = 0;
  std::uint64_t retransmitted = 0;

  // Measurement window (after warmup).
  std::uint64_t window_cycles = 0;
  std::uint64_t window_injected = 0;
  std::uint64_t window_received = 0;
  std::size_t participants = 0;
  double offered_rate = 0;
  double reception_rate = 0;  // window_received / participants / window_cycles
  double avg_packet_latency = 0;
  /// Per directed channel (link * 2 + direction, 0 = a->b): busy fraction.
  std::vector<double> link_utilization;
  bool saturated = false;
};

/// Cycle-level simulation. Every node is a router with one input port per
/// incoming channel (vcs_per_port packet slots each) plus, on hosts, an
/// unbounded injection queue. A packet that arrives at cycle t may leave at
/// t + router_pipeline and reaches the next node link_latency cycles after
/// it is granted, so an unloaded path of h links takes h * (pipeline +
/// latency) cycles. Next hops are drawn when a packet arrives (Random), hashed
/// per flow (Ecmp), or fixed at the source (Specialized).
SimStats run_simulation(const Topology& topology, RoutingMode mode, const SimConfig& config);

/// Same, reusing a precomputed table.
SimStats run_simulation(const Topology& topology, const RoutingTable& table, RoutingMode mode,
                        const SimConfig& config);

struct SweepPoint {
  double rate = 0;
  SimStats stats;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// First point whose reception fell below 95% of the offered rate.
  std::optional<std::size_t> saturation_index;
  /// Highest reception rate on the curve.
  double saturation_reception = 0;
};

/// One independent simulation per rate; the seed of point i is derived from
/// config.seed and i. Rates must be strictly increasing.
SweepResult sweep_injection(const Topology& topology, RoutingMode mode,
                            const TrafficPattern& pattern, const std::vector<double>& rates,
                            const SimConfig& config);

std::string sim_csv_header();
std::string to_csv_row(const std::string& topology, const SimConfig& config, const SimStats& s);

}  // namespace dcn
