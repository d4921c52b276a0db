#include <map>
#include <set>

#include <gtest/gtest.h>

#include "dcn/builders.hpp"
#include "dcn/errors.hpp"
#include "dcn/routing.hpp"
#include "oracles.hpp"

using namespace dcn;

namespace {

std::optional<NodeId> host_with(const Topology& t, std::vector<std::uint32_t> digits) {
  for (NodeId h : t.hosts())
    if (t.node(h).address.digits == digits) return h;
  return std::nullopt;
}

std::uint32_t tier(const Topology& t, NodeId n) { return t.node(n).address.digits.at(0); }
std::uint32_t pod(const Topology& t, NodeId n) { return t.node(n).address.digits.at(1); }

int hamming(const Topology& t, NodeId a, NodeId b) {
  const auto& x = t.node(a).address.digits;
  const auto& y = t.node(b).address.digits;
  int d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
  return d;
}

}  // namespace

TEST(EcmpTables, LineHasSingleHops) {
  TopologyBuilder b;
  const NodeId h0 = b.add_host(1), h1 = b.add_host(1), s = b.add_switch(2);
  b.add_link(h0, s);
  b.add_link(s, h1);
  const auto t = std::move(b).build(std::nullopt, ImportedParams{});
  const auto table = compute_ecmp_tables(t);
  ASSERT_EQ(table.next_hops(h0, 1).size(), 1u);
  EXPECT_EQ(table.next_hops(h0, 1)[0], s);
  ASSERT_EQ(table.next_hops(s, 1).size(), 1u);
  EXPECT_EQ(table.next_hops(s, 1)[0], h1);
  EXPECT_TRUE(table.next_hops(h1, 1).empty());
}

TEST(EcmpTables, FatTreeEdgeHasTwoUplinks) {
  const auto t = build_fat_tree(4);
  const auto table = compute_ecmp_tables(t);
  const NodeId src = t.host(0);
  const NodeId edge = t.neighbors(src)[0].neighbor;
  for (std::size_t d = 0; d < t.host_count(); ++d) {
    if (pod(t, t.host(d)) == pod(t, src)) continue;
    const auto hops = table.next_hops(edge, d);
    ASSERT_EQ(hops.size(), 2u);
    for (NodeId n : hops) EXPECT_EQ(tier(t, n), 2u);
  }
}

TEST(EcmpTables, NextHopsAreExactlyShortestNeighbours) {
  for (const auto& t : {build_fat_tree(4), build_dcell(4, 1), build_bcube(3, 1), build_jellyfish({12, 5, 3, 2})}) {
    const auto table = compute_ecmp_tables(t);
    const auto adj = oracle::adjacency(t);
    for (std::size_t d = 0; d < t.host_count(); ++d) {
      const NodeId dst = t.host(d);
      const auto dist = oracle::bfs(t, static_cast<std::uint32_t>(dst.index()), t.host_transit());
      for (const auto& n : t.nodes()) {
        if (n.id == dst) continue;
        std::set<std::uint32_t> expect;
        for (auto v : adj[n.id.index()]) {
          const bool relay_ok = v == dst.index() || t.host_transit() || t.nodes()[v].is_switch();
          if (relay_ok && dist[v] + 1 == dist[n.id.index()]) expect.insert(v);
        }
        std::set<std::uint32_t> got;
        for (NodeId h : table.next_hops(n.id, d)) got.insert(h.value);
        EXPECT_EQ(got, expect) << n.id.value << "->" << d;
        EXPECT_EQ(table.distance(n.id, d), dist[n.id.index()]);
      }
    }
  }
}

TEST(EcmpTables, WalksTerminate) {
  const auto t = build_dcell(3, 2);
  const auto table = compute_ecmp_tables(t);
  for (std::size_t s = 0; s < t.host_count(); s += 5) {
    for (std::size_t d = 0; d < t.host_count(); d += 3) {
      NodeId at = t.host(s);
      std::size_t steps = 0;
      while (at != t.host(d) && steps < t.node_count()) {
        at = table.next_hops(at, d)[0];
        ++steps;
      }
      EXPECT_EQ(at, t.host(d));
    }
  }
}

TEST(EcmpTables, DisconnectedThrows) {
  TopologyBuilder b;
  b.add_host(1);
  b.add_host(1);
  EXPECT_THROW(compute_ecmp_tables(std::move(b).build(std::nullopt, ImportedParams{})), DisconnectedError);
}

TEST(EcmpSelect, Behaviour) {
  const std::vector<NodeId> one{NodeId(7)};
  EXPECT_EQ(ecmp_select(one, 123), NodeId(7));
  const std::vector<NodeId> two{NodeId(1), NodeId(2)};
  EXPECT_EQ(ecmp_select(two, 99, 5), ecmp_select(two, 99, 5));
  Rng rng(3);
  int first = 0;
  for (int i = 0; i < 10'000; ++i) first += ecmp_select(two, rng.next()) == NodeId(1);
  EXPECT_NEAR(first / 10'000.0, 0.5, 0.05);
  int seq = 0;
  for (std::uint64_t i = 0; i < 10'000; ++i) seq += ecmp_select(two, i) == NodeId(1);
  EXPECT_NEAR(seq / 10'000.0, 0.5, 0.05);
}

TEST(FatTreeRoute, Lengths) {
  const auto t = build_fat_tree(4);
  Rng rng(1);
  for (std::size_t i = 0; i < t.host_count(); ++i) {
    for (std::size_t j = 0; j < t.host_count(); ++j) {
      if (i == j) continue;
      const NodeId s = t.host(i), d = t.host(j);
      const Route r = fat_tree_route(t, s, d, rng);
      EXPECT_TRUE(check_route(t, r, s, d).ok);
      const auto& sd = t.node(s).address.digits;
      const auto& dd = t.node(d).address.digits;
      const std::size_t expect = sd[1] != dd[1] ? 6 : sd[2] != dd[2] ? 4 : 2;
      EXPECT_EQ(r.length(), expect);
      if (expect < 6)
        for (NodeId n : r.nodes) EXPECT_NE(tier(t, n), 3u);
    }
  }
  EXPECT_THROW(fat_tree_route(t, t.host(0), t.host(0), rng), std::invalid_argument);
}

TEST(FatTreeRoute, UplinkCoverageAndUniqueDescent) {
  const auto t = build_fat_tree(4);
  const NodeId s = t.host(0), d = t.host(15);
  Rng rng(2);
  std::set<NodeId> cores;
  std::map<NodeId, std::vector<NodeId>> suffix;
  for (int i = 0; i < 1000; ++i) {
    const Route r = fat_tree_route(t, s, d, rng);
    const NodeId core = r.nodes[3];
    ASSERT_EQ(tier(t, core), 3u);
    cores.insert(core);
    std::vector<NodeId> down(r.nodes.begin() + 3, r.nodes.end());
    auto [it, fresh] = suffix.emplace(core, down);
    if (!fresh) EXPECT_EQ(it->second, down);
  }
  EXPECT_EQ(cores.size(), 4u);
}

TEST(FatTreeRoute, WorksOnF10) {
  const auto t = build_f10(4);
  Rng rng(5);
  for (std::size_t i = 0; i < t.host_count(); ++i)
    for (std::size_t j = 0; j < t.host_count(); ++j)
      if (i != j) {
        const Route r = fat_tree_route(t, t.host(i), t.host(j), rng);
        EXPECT_TRUE(check_route(t, r, t.host(i), t.host(j)).ok) << to_string(r);
      }
}

TEST(DCellRoute, Examples) {
  const auto t = build_dcell(4, 1);
  const Route same = dcell_route(t, *host_with(t, {0, 0}), *host_with(t, {0, 3}));
  EXPECT_EQ(same.length(), 2u);
  const Route direct = dcell_route(t, *host_with(t, {0, 0}), *host_with(t, {1, 0}));
  EXPECT_EQ(direct.length(), 1u);
}

TEST(DCellRoute, ExhaustiveBounds) {
  for (const auto& [n, l] : {std::pair{4u, 1u}, std::pair{2u, 2u}, std::pair{3u, 2u}}) {
    const auto t = build_dcell(n, l);
    const std::size_t bound = (std::size_t{1} << (l + 1)) - 1;
    for (std::size_t i = 0; i < t.host_count(); ++i) {
      const auto dist = oracle::bfs(t, static_cast<std::uint32_t>(t.host(i).index()), true);
      for (std::size_t j = 0; j < t.host_count(); ++j) {
        if (i == j) continue;
        const Route r = dcell_route(t, t.host(i), t.host(j));
        EXPECT_TRUE(check_route(t, r, t.host(i), t.host(j)).ok);
        EXPECT_GE(r.length(), dist[t.host(j).index()]);
        EXPECT_LE(host_hops(t, r), bound);
      }
    }
  }
}

TEST(BCubeRoute, TwiceHamming) {
  const auto small = build_bcube(4, 1);
  EXPECT_EQ(bcube_route(small, *host_with(small, {0, 0}), *host_with(small, {3, 3})).length(), 4u);
  EXPECT_EQ(bcube_route(small, *host_with(small, {0, 0}), *host_with(small, {0, 2})).length(), 2u);
  for (const auto& t : {build_bcube(2, 2), build_bcube(4, 1), build_bcube(3, 2)}) {
    for (std::size_t i = 0; i < t.host_count(); ++i) {
      for (std::size_t j = 0; j < t.host_count(); ++j) {
        if (i == j) continue;
        const Route r = bcube_route(t, t.host(i), t.host(j));
        EXPECT_TRUE(check_route(t, r, t.host(i), t.host(j)).ok);
        EXPECT_EQ(r.length(), 2u * static_cast<std::size_t>(hamming(t, t.host(i), t.host(j))));
      }
    }
  }
}

TEST(F10Reroute, CoreFailureKeepsLength) {
  const auto t = build_f10(4);
  Rng rng(3);
  const NodeId s = t.host(0), d = t.host(15);
  for (NodeId core : t.switches()) {
    if (tier(t, core) != 3) continue;
    const Route r = f10_reroute(t, s, d, core, rng);
    EXPECT_TRUE(check_route(t, r, s, d).ok);
    EXPECT_EQ(std::find(r.nodes.begin(), r.nodes.end(), core), r.nodes.end());
    EXPECT_EQ(r.length(), 6u);
  }
}

TEST(F10Reroute, DownPathAggregationFailure) {
  // F10 detours stay within +2 links; the plain fat tree needs +4.
  for (const bool f10 : {true, false}) {
    const auto t = f10 ? build_f10(4) : build_fat_tree(4);
    Rng rng(8);
    std::size_t worst = 0;
    std::size_t best = 100;
    for (std::size_t i = 0; i < t.host_count(); ++i) {
      for (std::size_t j = 0; j < t.host_count(); ++j) {
        const NodeId s = t.host(i), d = t.host(j);
        if (pod(t, s) == pod(t, d)) continue;
        for (int draw = 0; draw < 4; ++draw) {
          const Route normal = fat_tree_route(t, s, d, rng);
          const NodeId down_agg = normal.nodes[4];
          ASSERT_EQ(tier(t, down_agg), 2u);
          Rng same(draw);
          const Route r = f10_reroute(t, s, d, down_agg, same);
          EXPECT_TRUE(check_route(t, r, s, d).ok);
          EXPECT_EQ(std::find(r.nodes.begin(), r.nodes.end(), down_agg), r.nodes.end());
          if (r.length() > 6) {
            worst = std::max(worst, r.length() - 6);
            best = std::min(best, r.length() - 6);
          }
        }
      }
    }
    if (f10) EXPECT_LE(worst, 2u);
    else EXPECT_GE(best, 4u);
  }
}

TEST(CheckRoute, RejectsBadRoutes) {
  const auto t = build_fat_tree(4);
  const NodeId h0 = t.host(0), h1 = t.host(1), h2 = t.host(2);
  const NodeId e0 = t.neighbors(h0)[0].neighbor;
  EXPECT_TRUE(check_route(t, Route{{h0, e0, h1}}, h0, h1).ok);
  EXPECT_FALSE(check_route(t, Route{{h0, h1}}, h0, h1).ok);            // not adjacent
  EXPECT_FALSE(check_route(t, Route{{h0, e0, h0, e0, h1}}, h0, h1).ok);  // repeats
  EXPECT_FALSE(check_route(t, Route{{h0, e0, h1}}, h0, h2).ok);        // wrong end
  EXPECT_FALSE(check_route(t, Route{{e0, h1}}, e0, h1).ok);            // not a host
}

TEST(CheckRoute, ServerCentricHostsRelay) {
  const auto d = build_dcell(4, 1);
  const Route relayed = dcell_route(d, *host_with(d, {0, 1}), *host_with(d, {2, 1}));
  EXPECT_TRUE(check_route(d, relayed, relayed.nodes.front(), relayed.nodes.back()).ok);
}

TEST(Specialized, Dispatch) {
  EXPECT_TRUE(has_specialized_routing(build_fat_tree(4)));
  EXPECT_TRUE(has_specialized_routing(build_f10(4)));
  EXPECT_TRUE(has_specialized_routing(build_dcell(4, 1)));
  EXPECT_TRUE(has_specialized_routing(build_bcube(4, 1)));
  EXPECT_FALSE(has_specialized_routing(build_jellyfish({10, 4, 3, 1})));
  Rng rng(1);
  const auto j = build_jellyfish({10, 4, 3, 1});
  EXPECT_THROW(specialized_route(j, j.host(0), j.host(1), rng), std::invalid_argument);
}

TEST(RoutingMode, ParseRoundTrip) {
  for (auto m : {RoutingMode::Ecmp, RoutingMode::Random, RoutingMode::Specialized})
    EXPECT_EQ(parse_routing_mode(to_string(m)), m);
  EXPECT_THROW(parse_routing_mode("ospf"), std::invalid_argument);
}

TEST(Routes, EcmpAndRandomAreShortest) {
  const auto t = build_dcell(4, 1);
  const auto table = compute_ecmp_tables(t);
  Rng rng(4);
  for (std::size_t i = 0; i < t.host_count(); ++i) {
    const auto dist = oracle::bfs(t, static_cast<std::uint32_t>(t.host(i).index()), true);
    for (std::size_t j = 0; j < t.host_count(); ++j) {
      if (i == j) continue;
      const Route e = ecmp_route(t, table, t.host(i), t.host(j), i * 100 + j);
      const Route r = random_route(t, table, t.host(i), t.host(j), rng);
      EXPECT_TRUE(check_route(t, e, t.host(i), t.host(j)).ok);
      EXPECT_EQ(e.length(), dist[t.host(j).index()]);
      EXPECT_EQ(r.length(), dist[t.host(j).index()]);
    }
  }
}
