#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace dcn {

/// Three-tier k-ary fat tree. `hosts_per_edge` defaults to k/2.
struct FatTreeParams {
  std::uint32_t k = 4;
  std::optional<std::uint32_t> hosts_per_edge;

  friend bool operator==(const FatTreeParams&, const FatTreeParams&) = default;
};

/// Same node counts as a fat tree; pods alternate between two core wirings.
struct F10Params {
  std::uint32_t k = 4;

  friend bool operator==(const F10Params&, const F10Params&) = default;
};

struct FacebookFabricParams {
  std::uint32_t edge_switches = 48;
  std::uint32_t agg_switches = 4;
  std::uint32_t hosts_per_edge = 1;
  std::uint32_t planes = 1;
  double host_link_capacity = 1.0;
  double fabric_link_capacity = 4.0;

  friend bool operator==(const FacebookFabricParams&, const FacebookFabricParams&) = default;
};

struct DCellParams {
  std::uint32_t n = 4;
  std::uint32_t level = 1;

  friend bool operator==(const DCellParams&, const DCellParams&) = default;
};

struct BCubeParams {
  std::uint32_t n = 4;
  std::uint32_t k = 1;

  friend bool operator==(const BCubeParams&, const BCubeParams&) = default;
};

struct MDCubeParams {
  std::uint32_t rows = 1;
  std::uint32_t cols = 2;
  std::uint32_t n = 2;
  std::uint32_t k = 1;

  friend bool operator==(const MDCubeParams&, const MDCubeParams&) = default;
};

struct JellyfishParams {
  std::uint32_t num_switches = 10;
  std::uint32_t ports = 4;
  std::uint32_t r = 3;
  std::uint64_t seed = 1;

  friend bool operator==(const JellyfishParams&, const JellyfishParams&) = default;
};

/// Capped preferential growth. Switches and hosts join one at a time in a
/// seeded order; each newcomer attaches `links_per_node` links (bounded by
/// its own ports) to existing nodes that still have free ports.
struct ScafidaParams {
  std::uint32_t num_switches = 50;
  std::uint32_t num_hosts = 50;
  std::uint32_t max_degree = 5;
  std::uint64_t seed = 1;
  std::uint32_t host_ports = 1;
  std::uint32_t links_per_node = 2;

  friend bool operator==(const ScafidaParams&, const ScafidaParams&) = default;
};

struct HCNParams {
  std::uint32_t n = 4;
  std::uint32_t h = 1;

  friend bool operator==(const HCNParams&, const HCNParams&) = default;
};

struct BCNParams {
  std::uint32_t alpha = 3;
  std::uint32_t beta = 1;
  std::uint32_t h = 1;

  friend bool operator==(const BCNParams&, const BCNParams&) = default;
};

/// Topology read from an edge list; no construction parameters.
struct ImportedParams {
  friend bool operator==(const ImportedParams&, const ImportedParams&) = default;
};

using BuilderParams =
    std::variant<ImportedParams, FatTreeParams, F10Params, FacebookFabricParams,
                 DCellParams, BCubeParams, MDCubeParams, JellyfishParams,
                 ScafidaParams, HCNParams, BCNParams>;

/// Short family name ("fat-tree", "dcell", ...).
std::string family_name(const BuilderParams& params);

}  // namespace dcn
