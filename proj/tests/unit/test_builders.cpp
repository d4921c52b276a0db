#include <cstdlib>
#include <set>

#include <gtest/gtest.h>

#include "dcn/builders.hpp"
#include "dcn/edge_list.hpp"
#include "dcn/errors.hpp"
#include "oracles.hpp"

using namespace dcn;

namespace {

std::size_t switch_links(const Topology& t) {
  std::size_t n = 0;
  for (const auto& l : t.links()) n += t.node(l.a).is_switch() && t.node(l.b).is_switch();
  return n;
}

std::size_t switch_degree(const Topology& t, NodeId s) {
  std::size_t d = 0;
  for (const auto& inc : t.neighbors(s)) d += t.node(inc.neighbor).is_switch();
  return d;
}

std::size_t free_ports(const Topology& t) {
  std::size_t n = 0;
  for (const auto& node : t.nodes()) n += node.radix - t.degree(node.id);
  return n;
}

std::optional<NodeId> host_with(const Topology& t, std::vector<std::uint32_t> digits) {
  for (NodeId h : t.hosts())
    if (t.node(h).address.digits == digits) return h;
  return std::nullopt;
}

void expect_well_formed(const Topology& t) {
  const auto r = validate(t);
  for (const auto& v : r.violations) ADD_FAILURE() << v.message;
  for (const auto& n : t.nodes()) EXPECT_LE(t.degree(n.id), n.radix);
}

std::size_t count_tier(const Topology& t, std::uint32_t tier) {
  std::size_t n = 0;
  for (NodeId s : t.switches()) n += t.node(s).address.digits.at(0) == tier;
  return n;
}

}  // namespace

TEST(FatTree, K4Counts) {
  const auto t = build_fat_tree(4);
  EXPECT_EQ(t.host_count(), 16u);
  EXPECT_EQ(t.switch_count(), 20u);
  EXPECT_EQ(count_tier(t, 3), 4u);
  EXPECT_EQ(count_tier(t, 2), 8u);
  EXPECT_EQ(count_tier(t, 1), 8u);
  for (NodeId s : t.switches()) EXPECT_EQ(t.degree(s), 4u);
  EXPECT_EQ(t.taxonomy(), taxonomy::fat_tree());
  expect_well_formed(t);
}

TEST(FatTree, K2ByHand) {
  const auto t = build_fat_tree(2);
  EXPECT_EQ(count_tier(t, 3), 1u);
  EXPECT_EQ(count_tier(t, 2), 2u);
  EXPECT_EQ(count_tier(t, 1), 2u);
  EXPECT_EQ(t.host_count(), 2u);
}

TEST(FatTree, ClosedFormSweep) {
  for (std::uint32_t k : {2u, 4u, 6u, 8u, 10u}) {
    const auto t = build_fat_tree(k);
    EXPECT_EQ(t.host_count(), k * k * k / 4);
    EXPECT_EQ(t.switch_count(), 5 * k * k / 4);
    expect_well_formed(t);
  }
}

TEST(FatTree, RejectsOddOrZero) {
  EXPECT_THROW(build_fat_tree(3), std::invalid_argument);
  EXPECT_THROW(build_fat_tree(0), std::invalid_argument);
}

TEST(FatTree, HostsPerEdgeOverride) {
  const auto t = build_fat_tree(FatTreeParams{4, 1});
  EXPECT_EQ(t.host_count(), 8u);
  EXPECT_EQ(t.switch_count(), 20u);
}

TEST(Taxonomy, Rows) {
  EXPECT_EQ(taxonomy::fat_tree(),
            (TaxonomyRecord{BuildApproach::Deterministic, Centricity::SwitchCentric, Directness::Indirect,
                            true, false, Deployment::NonModular, Blocking::NonBlocking, Tiers::fixed(3)}));
  EXPECT_EQ(taxonomy::dcell(),
            (TaxonomyRecord{BuildApproach::Deterministic, Centricity::ServerCentric, Directness::Direct,
                            false, false, Deployment::NonModular, Blocking::Blocking, Tiers::n_tier()}));
  EXPECT_EQ(taxonomy::bcube(),
            (TaxonomyRecord{BuildApproach::Deterministic, Centricity::ServerCentric, Directness::Direct,
                            true, false, Deployment::Modular, Blocking::Blocking, Tiers::n_tier()}));
  EXPECT_EQ(taxonomy::jellyfish(),
            (TaxonomyRecord{BuildApproach::Random, Centricity::SwitchCentric, Directness::Direct, false,
                            true, Deployment::NonModular, Blocking::Blocking, Tiers::flat()}));
  EXPECT_EQ(taxonomy::scafida(),
            (TaxonomyRecord{BuildApproach::Random, Centricity::ServerCentric, Directness::Direct, false,
                            true, Deployment::NonModular, Blocking::Blocking, Tiers::flat()}));
  EXPECT_EQ(build_f10(4).taxonomy(), taxonomy::fat_tree());
  EXPECT_EQ(build_facebook_fabric({}).taxonomy(), taxonomy::fat_tree());
}

TEST(Facebook, ScaledPreset) {
  const auto t = build_facebook_fabric(FacebookFabricParams{});
  EXPECT_EQ(t.switch_count(), 52u);
  double host_cap = 0, fabric_cap = 0;
  for (const auto& l : t.links()) {
    const bool host_link = t.node(l.a).is_host() || t.node(l.b).is_host();
    (host_link ? host_cap : fabric_cap) = l.capacity;
  }
  EXPECT_DOUBLE_EQ(fabric_cap / host_cap, 4.0);
  expect_well_formed(t);
}

TEST(Facebook, SmallIsCompleteBipartite) {
  const auto t = build_facebook_fabric(FacebookFabricParams{2, 2, 1, 1, 1.0, 4.0});
  EXPECT_EQ(t.host_count(), 2u);
  EXPECT_EQ(switch_links(t), 4u);
  EXPECT_THROW(build_facebook_fabric(FacebookFabricParams{0, 2, 1, 1, 1.0, 4.0}), std::invalid_argument);
}

TEST(DCell, Counts) {
  const auto t = build_dcell(4, 1);
  EXPECT_EQ(t.host_count(), 20u);
  EXPECT_EQ(t.switch_count(), 5u);
  EXPECT_EQ(build_dcell(6, 1).host_count(), 42u);
  EXPECT_EQ(t.taxonomy(), taxonomy::dcell());
  expect_well_formed(t);
}

TEST(DCell, HostCountRecurrence) {
  EXPECT_EQ(dcell_host_count(4, 1), 20u);
  EXPECT_EQ(dcell_host_count(7, 0), 7u);
  EXPECT_EQ(dcell_host_count(6, 3), 3'263'442u);
  for (std::uint32_t n = 2; n <= 8; ++n)
    for (unsigned l = 0; l <= 3; ++l) EXPECT_EQ(dcell_host_count(n, l), oracle::dcell_hosts(n, l));
}

TEST(DCell, BuiltCountsMatchRecurrence) {
  for (std::uint32_t n = 2; n <= 5; ++n) {
    for (std::uint32_t l = 0; l <= 2; ++l) {
      if (oracle::dcell_hosts(n, l) > 2000) continue;
      const auto t = build_dcell(n, l);
      EXPECT_EQ(t.host_count(), oracle::dcell_hosts(n, l));
      EXPECT_EQ(t.switch_count(), oracle::dcell_hosts(n, l) / n);
      expect_well_formed(t);
    }
  }
}

TEST(DCell, ConnectionRule) {
  const auto t = build_dcell(4, 1);
  // sub-cell i's (j-1)-th host links to sub-cell j's i-th host, i < j
  for (std::uint32_t i = 0; i < 5; ++i)
    for (std::uint32_t j = i + 1; j < 5; ++j)
      EXPECT_TRUE(t.adjacent(*host_with(t, {i, j - 1}), *host_with(t, {j, i}))) << i << "," << j;
  EXPECT_TRUE(t.adjacent(*host_with(t, {0, 0}), *host_with(t, {1, 0})));
}

TEST(DCell, SizeCap) {
  EXPECT_THROW(build_dcell(DCellParams{6, 3}), SizeCapExceeded);
  try {
    build_dcell(DCellParams{4, 2}, BuildOptions{100});
    FAIL();
  } catch (const SizeCapExceeded& e) {
    EXPECT_EQ(e.requested(), 420u + 105u);
  }
}

TEST(SizeCap, EnvironmentOverride) {
  ::setenv("DCNBENCH_SIZE_CAP", "50", 1);
  EXPECT_EQ(size_cap_from_env(), 50u);
  EXPECT_THROW(build_fat_tree(FatTreeParams{6, {}}, BuildOptions{size_cap_from_env()}), SizeCapExceeded);
  ::setenv("DCNBENCH_SIZE_CAP", "nonsense", 1);
  EXPECT_EQ(size_cap_from_env(), kDefaultSizeCap);
  ::unsetenv("DCNBENCH_SIZE_CAP");
  EXPECT_EQ(size_cap_from_env(), kDefaultSizeCap);
}

TEST(BCube, Counts) {
  EXPECT_EQ(build_bcube(8, 3).host_count(), 4096u);
  const auto t = build_bcube(4, 1);
  EXPECT_EQ(t.host_count(), 16u);
  EXPECT_EQ(t.switch_count(), 8u);
  const auto base = build_bcube(2, 0);
  EXPECT_EQ(base.host_count(), 2u);
  EXPECT_EQ(base.switch_count(), 1u);
  for (std::uint32_t n = 2; n <= 4; ++n) {
    for (std::uint32_t k = 0; k <= 3; ++k) {
      const auto b = build_bcube(n, k);
      std::size_t nk = 1;
      for (std::uint32_t i = 0; i < k; ++i) nk *= n;
      EXPECT_EQ(b.host_count(), nk * n);
      EXPECT_EQ(b.switch_count(), (k + 1) * nk);
      expect_well_formed(b);
    }
  }
}

TEST(BCube, LevelSwitchJoinsHostsDifferingInOneDigit) {
  const auto t = build_bcube(3, 2);
  for (NodeId s : t.switches()) {
    std::vector<NodeId> hs;
    for (const auto& inc : t.neighbors(s)) hs.push_back(inc.neighbor);
    ASSERT_EQ(hs.size(), 3u);
    for (std::size_t x = 1; x < hs.size(); ++x) {
      const auto& a = t.node(hs[0]).address.digits;
      const auto& b = t.node(hs[x]).address.digits;
      int diff = 0;
      for (std::size_t d = 0; d < a.size(); ++d) diff += a[d] != b[d];
      EXPECT_EQ(diff, 1);
    }
  }
}

TEST(MDCube, InterContainerLinks) {
  auto inter = [](const MDCubeParams& p) {
    const auto t = build_mdcube(p);
    std::size_t per = 1;
    for (std::uint32_t i = 0; i <= p.k; ++i) per *= p.n;
    return t.link_count() - p.rows * p.cols * (p.k + 1) * per;
  };
  EXPECT_EQ(inter({1, 2, 2, 1}), 1u);
  EXPECT_EQ(inter({1, 3, 2, 1}), 3u);
  EXPECT_EQ(inter({3, 3, 2, 1}), 18u);
  const auto t = build_mdcube({3, 3, 2, 1});
  EXPECT_EQ(t.host_count(), 9u * 4u);
  expect_well_formed(t);
}

TEST(HCN, BaseAndRecursion) {
  const auto base = build_hcn(HCNParams{4, 0});
  EXPECT_EQ(base.host_count(), 4u);
  EXPECT_EQ(base.switch_count(), 1u);
  EXPECT_EQ(free_ports(base), 4u);
  for (std::uint32_t h = 1; h <= 2; ++h) {
    const auto t = build_hcn(HCNParams{4, h});
    std::size_t expect = 4;
    for (std::uint32_t i = 0; i < h; ++i) expect *= 4;
    EXPECT_EQ(t.host_count(), expect);
    EXPECT_EQ(free_ports(t), 4u);
    expect_well_formed(t);
  }
}

TEST(BCN, SlavesPerUnit) {
  EXPECT_EQ(bcn_slaves_per_unit(3, 1, 1), 3u);
  EXPECT_EQ(bcn_slaves_per_unit(2, 2, 2), 8u);
  expect_well_formed(build_bcn(BCNParams{3, 1, 1}));
  expect_well_formed(build_bcn(BCNParams{2, 2, 1}));
}

TEST(Jellyfish, RegularAndDeterministic) {
  const JellyfishParams p{10, 4, 3, 7};
  const auto t = build_jellyfish(p);
  EXPECT_EQ(t.host_count(), 10u);
  EXPECT_EQ(switch_links(t), 15u);
  for (NodeId s : t.switches()) EXPECT_EQ(switch_degree(t, s), 3u);
  expect_well_formed(t);
  EXPECT_EQ(export_edge_list(build_jellyfish(p)), export_edge_list(t));
  EXPECT_EQ(t.taxonomy(), taxonomy::jellyfish());
}

TEST(Jellyfish, ManySeedsStayRegular) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto t = build_jellyfish(JellyfishParams{20, 6, 4, seed});
    for (NodeId s : t.switches()) EXPECT_EQ(switch_degree(t, s), 4u);
    EXPECT_TRUE(is_connected(t));
  }
}

TEST(Jellyfish, Infeasible) {
  EXPECT_THROW(build_jellyfish(JellyfishParams{2, 2, 0, 1}), std::invalid_argument);
  EXPECT_THROW(build_jellyfish(JellyfishParams{5, 4, 3, 1}), std::invalid_argument);  // odd N*r
  EXPECT_THROW(build_jellyfish(JellyfishParams{3, 3, 3, 1}), std::invalid_argument);  // r >= ports
  EXPECT_THROW(build_jellyfish(JellyfishParams{3, 6, 4, 1}), std::invalid_argument);  // N < r+1
}

TEST(Jellyfish, ExpandKeepsOldDegrees) {
  const auto t = build_jellyfish(JellyfishParams{10, 4, 3, 1});
  const auto g = expand_jellyfish(t, 4, 3, 5);
  EXPECT_EQ(g.switch_count(), 11u);
  const NodeId fresh = g.switches().back();
  for (NodeId s : g.switches()) {
    if (s == fresh) EXPECT_GE(switch_degree(g, s), 2u);
    else EXPECT_EQ(switch_degree(g, s), 3u);
  }
  expect_well_formed(g);
  EXPECT_EQ(export_edge_list(expand_jellyfish(t, 4, 3, 5)), export_edge_list(g));
}

TEST(Jellyfish, ExpandTwoSwitchLineIntoPath) {
  const auto t = build_jellyfish(JellyfishParams{2, 2, 1, 1});
  ASSERT_EQ(switch_links(t), 1u);
  const auto g = expand_jellyfish(t, 3, 2, 1);
  EXPECT_EQ(g.switch_count(), 3u);
  EXPECT_EQ(switch_links(g), 2u);
  EXPECT_EQ(switch_degree(g, g.switches().back()), 2u);
  EXPECT_TRUE(is_connected(g));
}

TEST(Scafida, DegreeCapAndDeterminism) {
  const ScafidaParams p{50, 50, 5, 3, 1, 2};
  const auto t = build_scafida(p);
  for (const auto& n : t.nodes()) EXPECT_LE(t.degree(n.id), 5u);
  for (NodeId h : t.hosts()) EXPECT_EQ(t.degree(h), 1u);
  expect_well_formed(t);
  EXPECT_EQ(export_edge_list(build_scafida(p)), export_edge_list(t));
  EXPECT_EQ(t.taxonomy(), taxonomy::scafida());
}

TEST(Scafida, Star) {
  const auto t = build_scafida(ScafidaParams{1, 2, 5, 1, 1, 2});
  EXPECT_EQ(t.switch_count(), 1u);
  EXPECT_EQ(t.link_count(), 2u);
  for (NodeId h : t.hosts()) EXPECT_TRUE(t.adjacent(h, t.switches()[0]));
}

TEST(Scafida, LargeConfigStaysUnderCap) {
  const auto t = build_scafida(ScafidaParams{200, 400, 16, 1, 4, 3});
  for (NodeId s : t.switches()) EXPECT_LE(t.degree(s), 16u);
  for (NodeId h : t.hosts()) EXPECT_LE(t.degree(h), 4u);
  expect_well_formed(t);
}

TEST(Scafida, RejectsUnreachableConnectivity) {
  EXPECT_THROW(build_scafida(ScafidaParams{1, 10, 3, 1, 1, 2}), Error);
}

TEST(F10, SameCountsDifferentWiring) {
  const auto f = build_f10(4);
  const auto t = build_fat_tree(4);
  EXPECT_EQ(f.host_count(), t.host_count());
  EXPECT_EQ(f.switch_count(), t.switch_count());
  expect_well_formed(f);

  // Core parents of aggregation switch 0 in pod 0 (type A) and pod 1 (type B).
  auto parents = [&](std::uint32_t pod) {
    std::set<std::uint32_t> out;
    for (NodeId s : f.switches()) {
      const auto& d = f.node(s).address.digits;
      if (d[0] == 2 && d[1] == pod && d[2] == 0)
        for (const auto& inc : f.neighbors(s))
          if (f.node(inc.neighbor).address.digits[0] == 3) out.insert(inc.neighbor.value);
    }
    return out;
  };
  EXPECT_NE(parents(0), parents(1));
  EXPECT_THROW(build_f10(2), std::invalid_argument);
}

TEST(Builders, AllConnected) {
  for (const auto& t : {build_fat_tree(6), build_f10(6), build_dcell(3, 2), build_bcube(3, 2),
                        build_mdcube({2, 2, 2, 1}), build_hcn({3, 2}), build_bcn({2, 1, 2}),
                        build_jellyfish({30, 8, 5, 2}), build_scafida({40, 60, 10, 2, 2, 2})}) {
    EXPECT_TRUE(is_connected(t));
    expect_well_formed(t);
  }
}
