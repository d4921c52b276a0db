#include "dcn/builders.hpp"

#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include <fmt/core.h>

#include "dcn/errors.hpp"

namespace dcn {
namespace {

void check_cap(std::uint64_t nodes, const BuildOptions& options) {
  if (nodes > options.size_cap) throw SizeCapExceeded(nodes, options.size_cap);
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw std::overflow_error("topology size overflows 64 bits");
  }
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Shared by fat tree and F10. `reflected(pod)` picks the wiring of a pod's
// aggregation layer to the core: agg a -> core(a, j) normally, core(j, a)
// when reflected.
template <typename Reflected>
Topology build_three_tier(std::uint32_t k, std::uint32_t hosts_per_edge, Reflected reflected,
                          BuilderParams params, const BuildOptions& options) {
  FatTreeLayout layout(k, hosts_per_edge);
  check_cap(layout.node_count(), options);
  const std::uint32_t half = k / 2;

  TopologyBuilder b;
  for (std::uint32_t p = 0; p < k; ++p)
    for (std::uint32_t e = 0; e < half; ++e)
      for (std::uint32_t h = 0; h < hosts_per_edge; ++h)
        b.add_host(1, {{0, p, e, h}, AddressScheme::FatTreePod}, fmt::format("host-{}-{}-{}", p, e, h));
  const std::uint32_t edge_radix = half + hosts_per_edge;
  for (std::uint32_t p = 0; p < k; ++p)
    for (std::uint32_t e = 0; e < half; ++e)
      b.add_switch(edge_radix, {{1, p, e}, AddressScheme::FatTreePod}, fmt::format("edge-{}-{}", p, e));
  for (std::uint32_t p = 0; p < k; ++p)
    for (std::uint32_t a = 0; a < half; ++a)
      b.add_switch(k, {{2, p, a}, AddressScheme::FatTreePod}, fmt::format("agg-{}-{}", p, a));
  for (std::uint32_t i = 0; i < half; ++i)
    for (std::uint32_t j = 0; j < half; ++j)
      b.add_switch(k, {{3, i, j}, AddressScheme::FatTreePod}, fmt::format("core-{}-{}", i, j));

  for (std::uint32_t p = 0; p < k; ++p)
    for (std::uint32_t e = 0; e < half; ++e)
      for (std::uint32_t h = 0; h < hosts_per_edge; ++h)
        b.add_link(layout.host(p, e, h), layout.edge(p, e));
  for (std::uint32_t p = 0; p < k; ++p)
    for (std::uint32_t e = 0; e < half; ++e)
      for (std::uint32_t a = 0; a < half; ++a) b.add_link(layout.edge(p, e), layout.agg(p, a));
  for (std::uint32_t p = 0; p < k; ++p)
    for (std::uint32_t a = 0; a < half; ++a)
      for (std::uint32_t j = 0; j < half; ++j)
        b.add_link(layout.agg(p, a), reflected(p) ? layout.core(j, a) : layout.core(a, j));

  return std::move(b).build(taxonomy::fat_tree(), std::move(params));
}

}  // namespace

std::uint64_t size_cap_from_env() {
  if (const char* env = std::getenv("DCNBENCH_SIZE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultSizeCap;
}

namespace taxonomy {

TaxonomyRecord fat_tree() {
  return {BuildApproach::Deterministic, Centricity::SwitchCentric, Directness::Indirect,
          true, false, Deployment::NonModular, Blocking::NonBlocking, Tiers::fixed(3)};
}
TaxonomyRecord dcell() {
  return {BuildApproach::Deterministic, Centricity::ServerCentric, Directness::Direct,
          false, false, Deployment::NonModular, Blocking::Blocking, Tiers::n_tier()};
}
TaxonomyRecord bcube() {
  return {BuildApproach::Deterministic, Centricity::ServerCentric, Directness::Direct,
          true, false, Deployment::Modular, Blocking::Blocking, Tiers::n_tier()};
}
TaxonomyRecord mdcube() { return bcube(); }
TaxonomyRecord jellyfish() {
  return {BuildApproach::Random, Centricity::SwitchCentric, Directness::Direct,
          false, true, Deployment::NonModular, Blocking::Blocking, Tiers::flat()};
}
TaxonomyRecord scafida() {
  return {BuildApproach::Random, Centricity::ServerCentric, Directness::Direct,
          false, true, Deployment::NonModular, Blocking::Blocking, Tiers::flat()};
}
TaxonomyRecord hcn() {
  return {BuildApproach::Deterministic, Centricity::ServerCentric, Directness::Direct,
          true, true, Deployment::NonModular, Blocking::Blocking, Tiers::n_tier()};
}
TaxonomyRecord bcn() { return hcn(); }

}  // namespace taxonomy

// ---------------------------------------------------------------- fat tree

Topology build_fat_tree(const FatTreeParams& params, const BuildOptions& options) {
  require(params.k >= 2 && params.k % 2 == 0,
          fmt::format("fat tree needs an even k >= 2, got {}", params.k));
  const std::uint32_t hpe = params.hosts_per_edge.value_or(params.k / 2);
  require(hpe >= 1, "fat tree needs at least one host per edge switch");
  return build_three_tier(params.k, hpe, [](std::uint32_t) { return false; }, params, options);
}

Topology build_fat_tree(std::uint32_t k) { return build_fat_tree(FatTreeParams{k, {}}); }

Topology build_f10(const F10Params& params, const BuildOptions& options) {
  require(params.k >= 4 && params.k % 2 == 0,
          fmt::format("F10 needs an even k >= 4, got {}", params.k));
  // Even pods are type A, odd pods type B.
  return build_three_tier(params.k, params.k / 2, [](std::uint32_t pod) { return pod % 2 == 1; },
                          params, options);
}

Topology build_f10(std::uint32_t k) { return build_f10(F10Params{k}); }

FatTreeLayout FatTreeLayout::of(const Topology& t) {
  if (const auto* p = std::get_if<FatTreeParams>(&t.params())) {
    return FatTreeLayout(p->k, p->hosts_per_edge.value_or(p->k / 2));
  }
  if (const auto* p = std::get_if<F10Params>(&t.params())) return FatTreeLayout(p->k, p->k / 2);
  throw std::invalid_argument("topology is not a fat tree or F10");
}

// ---------------------------------------------------------------- facebook

Topology build_facebook_fabric(const FacebookFabricParams& p, const BuildOptions& options) {
  require(p.edge_switches >= 1 && p.agg_switches >= 1 && p.hosts_per_edge >= 1 && p.planes >= 1,
          "facebook fabric counts must be positive");
  require(p.host_link_capacity > 0 && p.fabric_link_capacity > 0,
          "facebook fabric capacities must be positive");
  const std::uint64_t hosts = checked_mul(p.edge_switches, p.hosts_per_edge);
  const std::uint64_t aggs = checked_mul(p.agg_switches, p.planes);
  check_cap(hosts + p.edge_switches + aggs, options);

  TopologyBuilder b;
  for (std::uint32_t e = 0; e < p.edge_switches; ++e)
    for (std::uint32_t h = 0; h < p.hosts_per_edge; ++h)
      b.add_host(1, {{0, e, h}, AddressScheme::FatTreePod}, fmt::format("host-{}-{}", e, h));
  const std::size_t edge_base = hosts;
  for (std::uint32_t e = 0; e < p.edge_switches; ++e)
    b.add_switch(p.hosts_per_edge + p.agg_switches * p.planes, {{1, e}, AddressScheme::FatTreePod},
                 fmt::format("edge-{}", e));
  const std::size_t agg_base = edge_base + p.edge_switches;
  for (std::uint32_t plane = 0; plane < p.planes; ++plane)
    for (std::uint32_t a = 0; a < p.agg_switches; ++a)
      b.add_switch(p.edge_switches, {{2, plane, a}, AddressScheme::FatTreePod},
                   fmt::format("agg-{}-{}", plane, a));

  for (std::uint32_t e = 0; e < p.edge_switches; ++e)
    for (std::uint32_t h = 0; h < p.hosts_per_edge; ++h)
      b.add_link(NodeId(std::size_t{e} * p.hosts_per_edge + h), NodeId(edge_base + e),
                 p.host_link_capacity);
  for (std::uint32_t e = 0; e < p.edge_switches; ++e)
    for (std::uint32_t plane = 0; plane < p.planes; ++plane)
      for (std::uint32_t a = 0; a < p.agg_switches; ++a)
        b.add_link(NodeId(edge_base + e),
                   NodeId(agg_base + std::size_t{plane} * p.agg_switches + a),
                   p.fabric_link_capacity);
  return std::move(b).build(taxonomy::fat_tree(), p);
}

// ---------------------------------------------------------------- dcell

std::uint64_t dcell_host_count(std::uint32_t n, std::uint32_t level) {
  require(n >= 2, "DCell needs n >= 2");
  std::uint64_t t = n;
  for (std::uint32_t l = 1; l <= level; ++l) t = checked_mul(t, t + 1);
  return t;
}

DCellLayout::DCellLayout(std::uint32_t n_, std::uint32_t level_) : n(n_), level(level_) {
  t.push_back(n);
  for (std::uint32_t l = 1; l <= level; ++l) t.push_back(checked_mul(t.back(), t.back() + 1));
}

DCellLayout DCellLayout::of(const Topology& topo) {
  const auto* p = std::get_if<DCellParams>(&topo.params());
  if (!p) throw std::invalid_argument("topology is not a DCell");
  return DCellLayout(p->n, p->level);
}

std::vector<std::uint32_t> DCellLayout::digits(std::uint64_t uid) const {
  std::vector<std::uint32_t> d(level + 1);
  for (std::uint32_t l = level; l >= 1; --l) {
    d[level - l] = static_cast<std::uint32_t>(uid / t[l - 1]);
    uid %= t[l - 1];
  }
  d[level] = static_cast<std::uint32_t>(uid);
  return d;
}

std::pair<std::uint64_t, std::uint64_t> DCellLayout::level_link(std::uint32_t l,
                                                                std::uint64_t base,
                                                                std::uint64_t i,
                                                                std::uint64_t j) const {
  // Sub-cell i's host (j-1) pairs with sub-cell j's host i, for i < j.
  const std::uint64_t sub = t[l - 1];
  if (i < j) return {base + i * sub + (j - 1), base + j * sub + i};
  return {base + i * sub + j, base + j * sub + (i - 1)};
}

Topology build_dcell(const DCellParams& params, const BuildOptions& options) {
  require(params.n >= 2, fmt::format("DCell needs n >= 2, got {}", params.n));
  const std::uint64_t hosts = dcell_host_count(params.n, params.level);
  const std::uint64_t switches = hosts / params.n;
  check_cap(hosts + switches, options);
  DCellLayout layout(params.n, params.level);

  TopologyBuilder b;
  for (std::uint64_t u = 0; u < hosts; ++u) {
    auto d = layout.digits(u);
    std::string label = "host";
    for (auto x : d) label += fmt::format("-{}", x);
    b.add_host(params.level + 1, {std::move(d), AddressScheme::DCellCoord}, std::move(label));
  }
  for (std::uint64_t s = 0; s < switches; ++s) {
    auto d = layout.digits(s * params.n);
    d.pop_back();
    std::string label = "switch";
    for (auto x : d) label += fmt::format("-{}", x);
    b.add_switch(params.n, {std::move(d), AddressScheme::DCellCoord}, std::move(label));
  }
  for (std::uint64_t u = 0; u < hosts; ++u) b.add_link(NodeId(u), layout.cell_switch(u));
  for (std::uint32_t l = 1; l <= params.level; ++l) {
    const std::uint64_t size = layout.t[l];
    const std::uint64_t g = layout.subcells(l);
    for (std::uint64_t base = 0; base < hosts; base += size) {
      for (std::uint64_t i = 0; i < g; ++i) {
        for (std::uint64_t j = i + 1; j < g; ++j) {
          auto [x, y] = layout.level_link(l, base, i, j);
          b.add_link(NodeId(x), NodeId(y));
        }
      }
    }
  }
  return std::move(b).build(taxonomy::dcell(), params);
}

Topology build_dcell(std::uint32_t n, std::uint32_t level) {
  return build_dcell(DCellParams{n, level});
}

// ---------------------------------------------------------------- bcube

std::uint64_t BCubeLayout::pow(std::uint32_t e) const { return checked_pow(n, e); }

BCubeLayout BCubeLayout::of(const Topology& topo) {
  const auto* p = std::get_if<BCubeParams>(&topo.params());
  if (!p) throw std::invalid_argument("topology is not a BCube");
  return BCubeLayout(p->n, p->k);
}

namespace {

// Appends a BCube_k; `prefix` digits lead every address. Returns the first
// switch id. Hosts must already have been added by the caller when
// `hosts_first` is false.
void add_bcube_hosts(TopologyBuilder& b, const BCubeLayout& layout,
                     const std::vector<std::uint32_t>& prefix) {
  for (std::uint64_t u = 0; u < layout.host_count(); ++u) {
    std::vector<std::uint32_t> d = prefix;
    std::string label = "host";
    for (auto x : prefix) label += fmt::format("-{}", x);
    for (std::uint32_t i = layout.k + 1; i-- > 0;) {
      d.push_back(layout.digit(u, i));
      label += fmt::format("-{}", layout.digit(u, i));
    }
    b.add_host(layout.k + 1, {std::move(d), AddressScheme::BCubeDigits}, std::move(label));
  }
}

void add_bcube_switches(TopologyBuilder& b, const BCubeLayout& layout,
                        const std::vector<std::uint32_t>& prefix,
                        const std::vector<char>& extra_port) {
  const std::uint64_t per_level = layout.switches_per_level();
  for (std::uint32_t level = 0; level <= layout.k; ++level) {
    for (std::uint64_t s = 0; s < per_level; ++s) {
      std::vector<std::uint32_t> d = prefix;
      d.push_back(level);
      // s enumerates the k digits other than `level`, least significant first.
      for (std::uint32_t i = layout.k; i-- > 0;) {
        d.push_back(static_cast<std::uint32_t>((s / layout.pow(i)) % layout.n));
      }
      std::string label = "switch";
      for (auto x : d) label += fmt::format("-{}", x);
      const std::uint64_t local = level * per_level + s;
      const bool extra = local < extra_port.size() && extra_port[local];
      b.add_switch(layout.n + (extra ? 1 : 0), {std::move(d), AddressScheme::BCubeDigits},
                   std::move(label));
    }
  }
}

void add_bcube_links(TopologyBuilder& b, const BCubeLayout& layout, std::uint64_t host_base,
                     std::uint64_t switch_base) {
  for (std::uint32_t level = 0; level <= layout.k; ++level) {
    for (std::uint64_t u = 0; u < layout.host_count(); ++u) {
      const std::uint64_t local = layout.level_switch(level, u).index() - layout.host_count();
      b.add_link(NodeId(host_base + u), NodeId(switch_base + local));
    }
  }
}

}  // namespace

Topology build_bcube(const BCubeParams& params, const BuildOptions& options) {
  require(params.n >= 2, fmt::format("BCube needs n >= 2, got {}", params.n));
  const std::uint64_t hosts = checked_pow(params.n, params.k + 1);
  const std::uint64_t switches = checked_mul(params.k + 1, checked_pow(params.n, params.k));
  check_cap(hosts + switches, options);
  BCubeLayout layout(params.n, params.k);

  TopologyBuilder b;
  add_bcube_hosts(b, layout, {});
  add_bcube_switches(b, layout, {}, {});
  add_bcube_links(b, layout, 0, hosts);
  return std::move(b).build(taxonomy::bcube(), params);
}

Topology build_bcube(std::uint32_t n, std::uint32_t k) { return build_bcube(BCubeParams{n, k}); }

// ---------------------------------------------------------------- mdcube

Topology build_mdcube(const MDCubeParams& p, const BuildOptions& options) {
  require(p.rows >= 1 && p.cols >= 1, "MDCube needs at least one row and column");
  require(p.n >= 2, "MDCube containers need n >= 2");
  const BCubeLayout layout(p.n, p.k);
  const std::uint64_t containers = std::uint64_t{p.rows} * p.cols;
  const std::uint64_t hc = layout.host_count();
  const std::uint64_t sc = (p.k + 1) * layout.switches_per_level();
  check_cap(checked_mul(containers, hc + sc), options);
  const std::uint64_t needed = (p.cols - 1) + (p.rows - 1);
  require(needed <= sc, fmt::format("MDCube {}x{} needs {} inter-container switches per "
                                    "container, BCube({},{}) has {}",
                                    p.rows, p.cols, needed, p.n, p.k, sc));

  // Designated switches are taken from the top level downward: row peers use
  // slots [0, cols-1), column peers [cols-1, cols-1+rows-1).
  auto designated = [&](std::uint64_t slot) { return (sc - 1) - slot; };
  std::vector<char> extra(sc, 0);
  for (std::uint64_t s = 0; s < needed; ++s) extra[designated(s)] = 1;

  TopologyBuilder b;
  for (std::uint32_t r = 0; r < p.rows; ++r)
    for (std::uint32_t c = 0; c < p.cols; ++c) add_bcube_hosts(b, layout, {r, c});
  const std::uint64_t switch_base = containers * hc;
  for (std::uint32_t r = 0; r < p.rows; ++r)
    for (std::uint32_t c = 0; c < p.cols; ++c) add_bcube_switches(b, layout, {r, c}, extra);
  for (std::uint64_t ci = 0; ci < containers; ++ci)
    add_bcube_links(b, layout, ci * hc, switch_base + ci * sc);

  auto sw = [&](std::uint32_t r, std::uint32_t c, std::uint64_t slot) {
    return NodeId(switch_base + (std::uint64_t{r} * p.cols + c) * sc + designated(slot));
  };
  for (std::uint32_t r = 0; r < p.rows; ++r)
    for (std::uint32_t c1 = 0; c1 < p.cols; ++c1)
      for (std::uint32_t c2 = c1 + 1; c2 < p.cols; ++c2)
        b.add_link(sw(r, c1, c2 - 1), sw(r, c2, c1));
  for (std::uint32_t c = 0; c < p.cols; ++c)
    for (std::uint32_t r1 = 0; r1 < p.rows; ++r1)
      for (std::uint32_t r2 = r1 + 1; r2 < p.rows; ++r2)
        b.add_link(sw(r1, c, (p.cols - 1) + (r2 - 1)), sw(r2, c, (p.cols - 1) + r1));
  return std::move(b).build(taxonomy::mdcube(), p);
}

// ---------------------------------------------------------------- hcn / bcn

namespace {

// Uid offset of the free-port server with index f inside a first-dimension
// unit of level m, where a level-m unit holds `fanout` level-(m-1) units of
// `unit_size[m-1]` hosts.
std::uint64_t free_server_offset(std::uint64_t f, std::uint32_t m,
                                 const std::vector<std::uint64_t>& unit_size) {
  std::uint64_t off = f;
  for (std::uint32_t l = 1; l <= m; ++l) off += f * unit_size[l - 1];
  return off;
}

struct Compound {
  std::uint64_t hosts = 0;
  std::uint64_t switches = 0;
};

// Adds the first-dimension recursion for `units` independent blocks laid out
// back to back. Base blocks are `per_switch` hosts on one switch; the first
// `fanout` hosts of each base block carry the extension port.
void add_first_dimension(TopologyBuilder& b, std::uint32_t per_switch, std::uint32_t fanout,
                         std::uint32_t h, std::uint64_t units, std::uint64_t host_total,
                         const std::vector<std::uint64_t>& unit_size) {
  for (std::uint64_t u = 0; u < host_total; ++u)
    b.add_link(NodeId(u), NodeId(host_total + u / per_switch));
  for (std::uint32_t l = 1; l <= h; ++l) {
    const std::uint64_t size = unit_size[l];
    const std::uint64_t sub = unit_size[l - 1];
    for (std::uint64_t base = 0; base < units * unit_size[h]; base += size) {
      for (std::uint64_t i = 0; i < fanout; ++i) {
        for (std::uint64_t j = i + 1; j < fanout; ++j) {
          const std::uint64_t x = base + i * sub + free_server_offset(j, l - 1, unit_size);
          const std::uint64_t y = base + j * sub + free_server_offset(i, l - 1, unit_size);
          b.add_link(NodeId(x), NodeId(y));
        }
      }
    }
  }
}

}  // namespace

Topology build_hcn(const HCNParams& p, const BuildOptions& options) {
  require(p.n >= 2, fmt::format("HCN needs n >= 2, got {}", p.n));
  const std::uint64_t hosts = checked_pow(p.n, p.h + 1);
  const std::uint64_t switches = hosts / p.n;
  check_cap(hosts + switches, options);
  std::vector<std::uint64_t> unit_size;
  for (std::uint32_t l = 0; l <= p.h; ++l) unit_size.push_back(checked_pow(p.n, l + 1));

  TopologyBuilder b;
  for (std::uint64_t u = 0; u < hosts; ++u) {
    std::vector<std::uint32_t> d;
    std::string label = "host";
    for (std::uint32_t i = p.h + 1; i-- > 0;) {
      d.push_back(static_cast<std::uint32_t>((u / checked_pow(p.n, i)) % p.n));
      label += fmt::format("-{}", d.back());
    }
    b.add_host(2, {std::move(d), AddressScheme::Flat}, std::move(label));
  }
  for (std::uint64_t s = 0; s < switches; ++s) b.add_switch(p.n, {}, fmt::format("switch-{}", s));
  add_first_dimension(b, p.n, p.n, p.h, 1, hosts, unit_size);
  return std::move(b).build(taxonomy::hcn(), p);
}

std::uint64_t bcn_slaves_per_unit(std::uint32_t alpha, std::uint32_t beta, std::uint32_t h) {
  return checked_mul(checked_pow(alpha, h), beta);
}

Topology build_bcn(const BCNParams& p, const BuildOptions& options) {
  require(p.alpha >= 1, "BCN needs alpha >= 1");
  const std::uint32_t n = p.alpha + p.beta;
  require(n >= 2, "BCN switches need at least two ports");
  const std::uint64_t slaves = bcn_slaves_per_unit(p.alpha, p.beta, p.h);
  const std::uint64_t units = slaves + 1;
  std::vector<std::uint64_t> unit_size;
  for (std::uint32_t l = 0; l <= p.h; ++l) unit_size.push_back(checked_mul(n, checked_pow(p.alpha, l)));
  const std::uint64_t hosts = checked_mul(units, unit_size[p.h]);
  const std::uint64_t switches = hosts / n;
  check_cap(hosts + switches, options);

  TopologyBuilder b;
  for (std::uint64_t u = 0; u < hosts; ++u) {
    const std::uint64_t unit = u / unit_size[p.h];
    const std::uint64_t base_block = (u % unit_size[p.h]) / n;
    const auto slot = static_cast<std::uint32_t>(u % n);
    b.add_host(2,
               {{static_cast<std::uint32_t>(unit), static_cast<std::uint32_t>(base_block), slot},
                AddressScheme::Flat},
               fmt::format("{}-{}-{}-{}", slot < p.alpha ? "master" : "slave", unit, base_block, slot));
  }
  for (std::uint64_t s = 0; s < switches; ++s) b.add_switch(n, {}, fmt::format("switch-{}", s));
  add_first_dimension(b, n, p.alpha, p.h, units, hosts, unit_size);

  // Second dimension: unit i's slave (j-1) links unit j's slave i, i < j.
  auto slave_uid = [&](std::uint64_t unit, std::uint64_t s) {
    return unit * unit_size[p.h] + (s / p.beta) * n + p.alpha + s % p.beta;
  };
  for (std::uint64_t i = 0; i < units; ++i)
    for (std::uint64_t j = i + 1; j < units; ++j)
      b.add_link(NodeId(slave_uid(i, j - 1)), NodeId(slave_uid(j, i)));
  return std::move(b).build(taxonomy::bcn(), p);
}

}  // namespace dcn
