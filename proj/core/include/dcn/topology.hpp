#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcn/params.hpp"

namespace dcn {

/// Dense node index, hosts first in every built topology.
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}
  constexpr explicit NodeId(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}
  constexpr explicit NodeId(int v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr std::size_t index() const { return value; }
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

enum class NodeKind : std::uint8_t { Host, Switch };

enum class AddressScheme : std::uint8_t { FatTreePod, DCellCoord, BCubeDigits, Flat };

/// Topology-specific coordinate. Digit order is most significant first.
///
/// FatTreePod:  {tier, ...} with tier 0 host {0,pod,edge,slot}, 1 edge
///              {1,pod,edge}, 2 aggregation {2,pod,agg}, 3 core {3,row,col}.
/// DCellCoord:  hosts {a_l, ..., a_1, a_0}; cell switches the prefix.
/// BCubeDigits: hosts {d_k, ..., d_0}; switches {level, remaining digits}.
struct Address {
  std::vector<std::uint32_t> digits;
  AddressScheme scheme = AddressScheme::Flat;

  friend bool operator==(const Address&, const Address&) = default;
};

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::Switch;
  std::uint32_t radix = 1;
  Address address;
  std::string label;

  bool is_host() const { return kind == NodeKind::Host; }
  bool is_switch() const { return kind == NodeKind::Switch; }

  friend bool operator==(const Node&, const Node&) = default;
};

inline constexpr double kDefaultLinkCapacity = 1.0;
inline constexpr std::uint32_t kDefaultLinkLatency = 10;

/// Undirected link; simulators treat it as two independent simplex channels.
struct Link {
  NodeId a;
  NodeId b;
  double capacity = kDefaultLinkCapacity;
  std::uint32_t latency = kDefaultLinkLatency;

  NodeId other(NodeId x) const { return x == a ? b : a; }

  friend bool operator==(const Link&, const Link&) = default;
};

enum class BuildApproach : std::uint8_t { Random, Deterministic };
enum class Centricity : std::uint8_t { ServerCentric, SwitchCentric };
enum class Directness : std::uint8_t { Direct, Indirect };
enum class Deployment : std::uint8_t { Modular, NonModular };
enum class Blocking : std::uint8_t { NonBlocking, Blocking };

struct Tiers {
  enum class Kind : std::uint8_t { Flat, Fixed, NTier };
  Kind kind = Kind::Flat;
  std::uint32_t count = 1;  // meaningful for Fixed only

  static constexpr Tiers flat() { return {Kind::Flat, 1}; }
  static constexpr Tiers fixed(std::uint32_t n) { return {Kind::Fixed, n}; }
  static constexpr Tiers n_tier() { return {Kind::NTier, 0}; }
  friend bool operator==(const Tiers&, const Tiers&) = default;
};

/// Where a topology family sits on the usual classification axes.
struct TaxonomyRecord {
  BuildApproach build_approach = BuildApproach::Deterministic;
  Centricity centricity = Centricity::SwitchCentric;
  Directness directness = Directness::Indirect;
  bool symmetric = false;
  bool extensible = false;
  Deployment deployment = Deployment::NonModular;
  Blocking blocking = Blocking::Blocking;
  Tiers tiers;

  friend bool operator==(const TaxonomyRecord&, const TaxonomyRecord&) = default;
};

std::string to_string(const TaxonomyRecord& t);

/// One entry of a node's adjacency list.
struct Incidence {
  NodeId neighbor;
  std::uint32_t link = 0;
};

/// Immutable graph of hosts and switches.
///
/// Construction does not validate; call validate() for a violation report.
/// Link endpoints must reference existing nodes.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Node> nodes, std::vector<Link> links,
           std::optional<TaxonomyRecord> taxonomy, BuilderParams params);

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  const Node& node(NodeId id) const { return nodes_[id.index()]; }
  const Link& link(std::uint32_t index) const { return links_[index]; }
  std::span<const Incidence> neighbors(NodeId id) const { return adjacency_[id.index()]; }
  std::size_t degree(NodeId id) const { return adjacency_[id.index()].size(); }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t host_count() const { return hosts_.size(); }
  std::size_t switch_count() const { return nodes_.size() - hosts_.size(); }

  /// Hosts in id order; position in this list is the host index used by
  /// traffic patterns.
  std::span<const NodeId> hosts() const { return hosts_; }
  std::span<const NodeId> switches() const { return switches_; }
  NodeId host(std::size_t host_index) const { return hosts_[host_index]; }
  /// Host index of `id`, or nullopt for switches.
  std::optional<std::size_t> host_index(NodeId id) const;

  std::optional<std::uint32_t> find_link(NodeId a, NodeId b) const;
  bool adjacent(NodeId a, NodeId b) const { return find_link(a, b).has_value(); }

  /// Absent for imported topologies.
  const std::optional<TaxonomyRecord>& taxonomy() const { return taxonomy_; }
  const BuilderParams& params() const { return params_; }

  /// Whether hosts may relay traffic: true for server-centric and
  /// unclassified topologies.
  bool host_transit() const;

  /// Whether `id` may appear as an interior node of a route.
  bool can_forward(NodeId id) const { return node(id).is_switch() || host_transit(); }

  /// Equal node and link content; labels, taxonomy and params are ignored.
  friend bool operator==(const Topology& x, const Topology& y);

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::vector<NodeId> hosts_;
  std::vector<NodeId> switches_;
  std::vector<std::uint32_t> host_rank_;
  std::optional<TaxonomyRecord> taxonomy_;
  BuilderParams params_;
};

/// Incremental assembly of a Topology; builders use this and then freeze.
class TopologyBuilder {
 public:
  NodeId add_node(NodeKind kind, std::uint32_t radix, Address address = {},
                  std::string label = {});
  NodeId add_host(std::uint32_t radix, Address address = {}, std::string label = {}) {
    return add_node(NodeKind::Host, radix, std::move(address), std::move(label));
  }
  NodeId add_switch(std::uint32_t radix, Address address = {}, std::string label = {}) {
    return add_node(NodeKind::Switch, radix, std::move(address), std::move(label));
  }
  std::uint32_t add_link(NodeId a, NodeId b, double capacity = kDefaultLinkCapacity,
                         std::uint32_t latency = kDefaultLinkLatency);

  std::size_t node_count() const { return nodes_.size(); }

  Topology build(std::optional<TaxonomyRecord> taxonomy, BuilderParams params) &&;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
};

enum class ViolationKind : std::uint8_t {
  RadixExceeded,
  DuplicateLink,
  SelfLoop,
  BadLinkAttributes,
  Disconnected,
  AddressInconsistent,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

/// Structural checks. Violations are data, never exceptions.
ValidationReport validate(const Topology& topology);

bool is_connected(const Topology& topology);

}  // namespace dcn

template <>
struct std::hash<dcn::NodeId> {
  std::size_t operator()(dcn::NodeId id) const noexcept { return id.value; }
};
