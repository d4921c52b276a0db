#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dcn/params.hpp"
#include "dcn/topology.hpp"

namespace dcn {

inline constexpr std::uint64_t kDefaultSizeCap = 100'000;

struct BuildOptions {
  /// Upper bound on node count (hosts + switches).
  std::uint64_t size_cap = kDefaultSizeCap;
};

/// Cap from DCNBENCH_SIZE_CAP when set to a positive integer, else the default.
std::uint64_t size_cap_from_env();

// Taxonomy rows per family.
namespace taxonomy {
TaxonomyRecord fat_tree();
TaxonomyRecord dcell();
TaxonomyRecord bcube();
TaxonomyRecord mdcube();
TaxonomyRecord jellyfish();
TaxonomyRecord scafida();
TaxonomyRecord hcn();
TaxonomyRecord bcn();
}  // namespace taxonomy

Topology build_fat_tree(const FatTreeParams& params, const BuildOptions& options = {});
Topology build_fat_tree(std::uint32_t k);
Topology build_f10(const F10Params& params, const BuildOptions& options = {});
Topology build_f10(std::uint32_t k);
Topology build_facebook_fabric(const FacebookFabricParams& params,
                               const BuildOptions& options = {});
Topology build_dcell(const DCellParams& params, const BuildOptions& options = {});
Topology build_dcell(std::uint32_t n, std::uint32_t level);
Topology build_bcube(const BCubeParams& params, const BuildOptions& options = {});
Topology build_bcube(std::uint32_t n, std::uint32_t k);
Topology build_mdcube(const MDCubeParams& params, const BuildOptions& options = {});
Topology build_hcn(const HCNParams& params, const BuildOptions& options = {});
Topology build_bcn(const BCNParams& params, const BuildOptions& options = {});
Topology build_jellyfish(const JellyfishParams& params, const BuildOptions& options = {});
Topology build_scafida(const ScafidaParams& params, const BuildOptions& options = {});

/// Adds one switch with `ports` ports to a Jellyfish topology by repeatedly
/// splitting a random switch link (x,y) into (x,new),(y,new) until the new
/// switch has r, or r-1 for odd r, switch links. Existing degrees are kept.
Topology expand_jellyfish(const Topology& topology, std::uint32_t ports, std::uint32_t r,
                          std::uint64_t seed, const BuildOptions& options = {});

/// Host count of DCell_level without building it. Throws std::overflow_error
/// when the value does not fit in 64 bits.
std::uint64_t dcell_host_count(std::uint32_t n, std::uint32_t level);

/// Slave servers per BCN(alpha, beta, h) unit: alpha^h * beta.
std::uint64_t bcn_slaves_per_unit(std::uint32_t alpha, std::uint32_t beta, std::uint32_t h);

/// Node-id arithmetic of a built fat tree (or F10). Hosts first, then edge,
/// aggregation and core switches.
struct FatTreeLayout {
  std::uint32_t k = 4;
  std::uint32_t hosts_per_edge = 2;

  explicit FatTreeLayout(std::uint32_t k_, std::uint32_t hosts_per_edge_)
      : k(k_), hosts_per_edge(hosts_per_edge_) {}
  static FatTreeLayout of(const Topology& t);

  std::uint32_t half() const { return k / 2; }
  std::size_t host_count() const { return std::size_t{k} * half() * hosts_per_edge; }
  std::size_t edge_base() const { return host_count(); }
  std::size_t agg_base() const { return edge_base() + std::size_t{k} * half(); }
  std::size_t core_base() const { return agg_base() + std::size_t{k} * half(); }
  std::size_t node_count() const { return core_base() + std::size_t{half()} * half(); }

  NodeId host(std::uint32_t pod, std::uint32_t edge, std::uint32_t slot) const {
    return NodeId((std::size_t{pod} * half() + edge) * hosts_per_edge + slot);
  }
  NodeId edge(std::uint32_t pod, std::uint32_t e) const {
    return NodeId(edge_base() + std::size_t{pod} * half() + e);
  }
  NodeId agg(std::uint32_t pod, std::uint32_t a) const {
    return NodeId(agg_base() + std::size_t{pod} * half() + a);
  }
  NodeId core(std::uint32_t row, std::uint32_t col) const {
    return NodeId(core_base() + std::size_t{row} * half() + col);
  }
};

/// Node-id arithmetic of DCell_level: host uid order, then one switch per
/// DCell_0.
struct DCellLayout {
  std::uint32_t n = 4;
  std::uint32_t level = 1;
  std::vector<std::uint64_t> t;  // t[l] = hosts in a DCell_l

  DCellLayout(std::uint32_t n_, std::uint32_t level_);
  static DCellLayout of(const Topology& t);

  std::uint64_t host_count() const { return t[level]; }
  std::uint64_t subcells(std::uint32_t l) const { return t[l - 1] + 1; }
  NodeId cell_switch(std::uint64_t host_uid) const { return NodeId(host_count() + host_uid / n); }
  /// Digits {a_level, ..., a_0} of a host uid.
  std::vector<std::uint32_t> digits(std::uint64_t uid) const;
  /// Endpoints (uids) of the level-l link between sub-cells `i` and `j` of the
  /// DCell_l instance whose first host uid is `base`. Endpoint .first lies in
  /// sub-cell i.
  std::pair<std::uint64_t, std::uint64_t> level_link(std::uint32_t l, std::uint64_t base,
                                                     std::uint64_t i, std::uint64_t j) const;
};

/// Node-id arithmetic of BCube_k: n^(k+1) hosts, then (k+1) levels of n^k
/// switches.
struct BCubeLayout {
  std::uint32_t n = 4;
  std::uint32_t k = 1;

  BCubeLayout(std::uint32_t n_, std::uint32_t k_) : n(n_), k(k_) {}
  static BCubeLayout of(const Topology& t);

  std::uint64_t pow(std::uint32_t e) const;
  std::uint64_t host_count() const { return pow(k + 1); }
  std::uint64_t switches_per_level() const { return pow(k); }
  /// Digit i (0 = least significant) of host uid.
  std::uint32_t digit(std::uint64_t uid, std::uint32_t i) const {
    return static_cast<std::uint32_t>((uid / pow(i)) % n);
  }
  std::uint64_t with_digit(std::uint64_t uid, std::uint32_t i, std::uint32_t value) const {
    return uid - std::uint64_t{digit(uid, i)} * pow(i) + std::uint64_t{value} * pow(i);
  }
  /// Switch at `level` that connects `uid` to the hosts differing only in that digit.
  NodeId level_switch(std::uint32_t level, std::uint64_t uid) const {
    const std::uint64_t low = uid % pow(level);
    const std::uint64_t high = uid / pow(level + 1);
    return NodeId(host_count() + level * switches_per_level() + high * pow(level) + low);
  }
};

}  // namespace dcn
