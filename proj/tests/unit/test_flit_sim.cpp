#include <gtest/gtest.h>

#include "dcn/builders.hpp"
#include "dcn/crossbar.hpp"
#include "dcn/flit_sim.hpp"

using namespace dcn;

namespace {

// Every host sends to the other host on its edge switch: two links each way.
TrafficPattern edge_neighbours(std::size_t hosts) {
  std::vector<std::uint32_t> map(hosts);
  for (std::uint32_t i = 0; i < hosts; ++i) map[i] = i ^ 1u;
  return TrafficPattern::from_map(map);
}

void expect_conserved(const SimStats& s) {
  EXPECT_EQ(s.packets_injected, s.packets_received + s.in_flight + s.awaiting_retransmit);
  EXPECT_LE(s.packets_received, s.packets_injected);
  for (double u : s.link_utilization) {
    EXPECT_GE(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

}  // namespace

TEST(FlitSim, ZeroLoadLatencyIsHopsTimesPerHop) {
  const auto t = build_fat_tree(4);
  SimConfig cfg;
  cfg.injection_rate = 0.0005;
  cfg.sim_cycles = 200'000;
  for (const auto& [pattern, hops] : {std::pair{edge_neighbours(16), 2.0},
                                      std::pair{TrafficPattern::complement(), 6.0}}) {
    cfg.pattern = pattern;
    const auto s = run_simulation(t, RoutingMode::Random, cfg);
    ASSERT_GT(s.window_received, 100u);
    EXPECT_NEAR(s.avg_packet_latency, hops * (cfg.router_pipeline + cfg.link_latency), 1.0);
  }
  cfg.pattern = edge_neighbours(16);
  cfg.router_pipeline = 2;
  cfg.link_latency = 3;
  EXPECT_NEAR(run_simulation(t, RoutingMode::Ecmp, cfg).avg_packet_latency, 10.0, 1.0);
}

TEST(FlitSim, PerLinkLatencyMode) {
  TopologyBuilder b;
  const NodeId h0 = b.add_host(1), h1 = b.add_host(1), s = b.add_switch(2);
  b.add_link(h0, s, 1.0, 7);
  b.add_link(s, h1, 1.0, 3);
  const auto t = std::move(b).build(std::nullopt, ImportedParams{});
  SimConfig cfg;
  cfg.injection_rate = 0.001;
  cfg.sim_cycles = 100'000;
  cfg.link_latency = 0;
  cfg.pattern = TrafficPattern::from_map({1, 0});
  const auto st = run_simulation(t, RoutingMode::Random, cfg);
  EXPECT_NEAR(st.avg_packet_latency, 2 * 5 + 7 + 3, 0.5);
}

TEST(FlitSim, ReceptionTracksOfferedBelowSaturation) {
  SimConfig cfg;
  cfg.injection_rate = 0.05;
  const auto s = run_simulation(build_fat_tree(4), RoutingMode::Random, cfg);
  EXPECT_NEAR(s.reception_rate, 0.05, 0.005);
  EXPECT_FALSE(s.saturated);
  expect_conserved(s);
}

TEST(FlitSim, ReceptionFormula) {
  SimConfig cfg;
  cfg.injection_rate = 0.3;
  cfg.sim_cycles = 4000;
  cfg.warmup_cycles = 500;
  const auto s = run_simulation(build_dcell(4, 1), RoutingMode::Random, cfg);
  EXPECT_EQ(s.window_cycles, 3500u);
  EXPECT_EQ(s.participants, 20u);
  EXPECT_DOUBLE_EQ(s.reception_rate, static_cast<double>(s.window_received) / 20.0 / 3500.0);
}

TEST(FlitSim, ConservationUnderOverload) {
  for (const bool drop : {true, false}) {
    SimConfig cfg;
    cfg.injection_rate = 1.0;
    cfg.sim_cycles = 3000;
    cfg.vcs_per_port = 4;
    cfg.drop_and_retransmit = drop;
    for (const auto& t : {build_fat_tree(4), build_dcell(4, 1), build_bcube(4, 1)}) {
      const auto s = run_simulation(t, RoutingMode::Random, cfg);
      expect_conserved(s);
      EXPECT_TRUE(s.saturated);
      if (!drop) {
        EXPECT_EQ(s.dropped, 0u);
        EXPECT_EQ(s.retransmitted, 0u);
      } else {
        EXPECT_GT(s.dropped, 0u);
      }
    }
  }
}

TEST(FlitSim, WaitModeLosesNothingBelowSaturation) {
  SimConfig cfg;
  cfg.injection_rate = 0.2;
  cfg.drop_and_retransmit = false;
  const auto s = run_simulation(build_dcell(4, 1), RoutingMode::Random, cfg);
  EXPECT_EQ(s.dropped, 0u);
  EXPECT_NEAR(s.reception_rate, 0.2, 0.01);
}

TEST(FlitSim, Deterministic) {
  SimConfig cfg;
  cfg.injection_rate = 0.6;
  cfg.sim_cycles = 3000;
  const auto t = build_dcell(4, 1);
  for (auto mode : {RoutingMode::Random, RoutingMode::Ecmp, RoutingMode::Specialized}) {
    const auto a = run_simulation(t, mode, cfg);
    const auto b = run_simulation(t, mode, cfg);
    EXPECT_EQ(to_csv_row("x", cfg, a), to_csv_row("x", cfg, b));
    EXPECT_EQ(a.link_utilization, b.link_utilization);
  }
  SimConfig other = cfg;
  other.seed = 2;
  EXPECT_NE(run_simulation(t, RoutingMode::Random, cfg).packets_injected,
            run_simulation(t, RoutingMode::Random, other).packets_injected);
}

TEST(FlitSim, BitPatternOnSubset) {
  SimConfig cfg;
  cfg.injection_rate = 0.1;
  cfg.pattern = TrafficPattern::complement();
  const auto s = run_simulation(build_dcell(4, 1), RoutingMode::Random, cfg);
  EXPECT_EQ(s.participants, 16u);
  EXPECT_NEAR(s.reception_rate, 0.1, 0.01);
}

TEST(FlitSim, RejectsBadConfig) {
  const auto t = build_fat_tree(2);
  auto bad = [&](auto tweak) {
    SimConfig c;
    tweak(c);
    EXPECT_THROW(run_simulation(t, RoutingMode::Random, c), std::invalid_argument);
  };
  bad([](SimConfig& c) { c.injection_rate = 0; });
  bad([](SimConfig& c) { c.injection_rate = 1.5; });
  bad([](SimConfig& c) { c.sim_cycles = 0; });
  bad([](SimConfig& c) { c.warmup_cycles = c.sim_cycles; });
  bad([](SimConfig& c) { c.vcs_per_port = 0; });
  bad([](SimConfig& c) { c.flits_per_packet = 0; });
  SimConfig c;
  EXPECT_THROW(run_simulation(build_jellyfish({10, 4, 3, 1}), RoutingMode::Specialized, c), std::invalid_argument);
}

TEST(Sweep, ShapeAndSaturation) {
  SimConfig cfg;
  cfg.sim_cycles = 5000;
  const std::vector<double> rates{0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  const auto r = sweep_injection(build_fat_tree(4), RoutingMode::Random, TrafficPattern::uniform(), rates, cfg);
  ASSERT_EQ(r.points.size(), rates.size());
  ASSERT_TRUE(r.saturation_index.has_value());
  for (std::size_t i = 0; i < *r.saturation_index; ++i) {
    EXPECT_FALSE(r.points[i].stats.saturated);
    if (i > 0) EXPECT_GT(r.points[i].stats.reception_rate, r.points[i - 1].stats.reception_rate);
  }
  EXPECT_LT(r.points[*r.saturation_index].stats.reception_rate, 0.95 * rates[*r.saturation_index]);
  // past saturation the curve flattens
  for (std::size_t i = *r.saturation_index + 1; i < rates.size(); ++i)
    EXPECT_NEAR(r.points[i].stats.reception_rate, r.points[i - 1].stats.reception_rate, 0.05);
}

TEST(Sweep, RejectsBadRates) {
  SimConfig cfg;
  const auto t = build_fat_tree(2);
  EXPECT_THROW(sweep_injection(t, RoutingMode::Random, TrafficPattern::uniform(), {}, cfg), std::invalid_argument);
  EXPECT_THROW(sweep_injection(t, RoutingMode::Random, TrafficPattern::uniform(), {0.2, 0.2}, cfg),
               std::invalid_argument);
}

TEST(SimCsv, Header) {
  EXPECT_EQ(sim_csv_header(),
            "topology,pattern,rate,vcs,cycles,injected,received,reception_rate,avg_latency,dropped,saturated");
}

TEST(Crossbar, SmallAndOutputQueued) {
  EXPECT_NEAR(crossbar_saturation_micro(2, 200'000, 1), 0.75, 0.02);
  EXPECT_GE(crossbar_saturation_micro(16, 100'000, 1, CrossbarQueueing::OutputQueued), 0.99);
  EXPECT_NEAR(crossbar_saturation_micro(8, 100'000, 3), 0.618, 0.02);
}
