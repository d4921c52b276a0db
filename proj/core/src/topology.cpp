#include "dcn/topology.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <type_traits>

#include <fmt/core.h>

namespace dcn {

std::string family_name(const BuilderParams& params) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ImportedParams>) return "imported";
        if constexpr (std::is_same_v<T, FatTreeParams>) return "fat-tree";
        if constexpr (std::is_same_v<T, F10Params>) return "f10";
        if constexpr (std::is_same_v<T, FacebookFabricParams>) return "facebook";
        if constexpr (std::is_same_v<T, DCellParams>) return "dcell";
        if constexpr (std::is_same_v<T, BCubeParams>) return "bcube";
        if constexpr (std::is_same_v<T, MDCubeParams>) return "mdcube";
        if constexpr (std::is_same_v<T, JellyfishParams>) return "jellyfish";
        if constexpr (std::is_same_v<T, ScafidaParams>) return "scafida";
        if constexpr (std::is_same_v<T, HCNParams>) return "hcn";
        if constexpr (std::is_same_v<T, BCNParams>) return "bcn";
      },
      params);
}

std::string to_string(const TaxonomyRecord& t) {
  std::string tiers;
  switch (t.tiers.kind) {
    case Tiers::Kind::Flat: tiers = "flat"; break;
    case Tiers::Kind::Fixed: tiers = fmt::format("fixed({})", t.tiers.count); break;
    case Tiers::Kind::NTier: tiers = "n-tier"; break;
  }
  return fmt::format(
      "{}/{}/{}/{}/{}/{}/{}/{}",
      t.build_approach == BuildApproach::Random ? "random" : "deterministic",
      t.centricity == Centricity::ServerCentric ? "server-centric" : "switch-centric",
      t.directness == Directness::Direct ? "direct" : "indirect",
      t.symmetric ? "symmetric" : "asymmetric", t.extensible ? "extensible" : "non-extensible",
      t.deployment == Deployment::Modular ? "modular" : "non-modular",
      t.blocking == Blocking::NonBlocking ? "non-blocking" : "blocking", tiers);
}

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links,
                   std::optional<TaxonomyRecord> taxonomy, BuilderParams params)
    : nodes_(std::move(nodes)),
      links_(std::move(links)),
      adjacency_(nodes_.size()),
      host_rank_(nodes_.size(), UINT32_MAX),
      taxonomy_(std::move(taxonomy)),
      params_(std::move(params)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id.index() != i) {
      throw std::invalid_argument(fmt::format("node {} carries id {}", i, nodes_[i].id.value));
    }
    if (nodes_[i].is_host()) {
      host_rank_[i] = static_cast<std::uint32_t>(hosts_.size());
      hosts_.push_back(nodes_[i].id);
    } else {
      switches_.push_back(nodes_[i].id);
    }
  }
  for (std::size_t l = 0; l < links_.size(); ++l) {
    const Link& link = links_[l];
    if (link.a.index() >= nodes_.size() || link.b.index() >= nodes_.size()) {
      throw std::invalid_argument(
          fmt::format("link {} references missing node ({}, {})", l, link.a.value, link.b.value));
    }
    const auto li = static_cast<std::uint32_t>(l);
    adjacency_[link.a.index()].push_back({link.b, li});
    if (link.a != link.b) adjacency_[link.b.index()].push_back({link.a, li});
  }
}

std::optional<std::size_t> Topology::host_index(NodeId id) const {
  const auto rank = host_rank_[id.index()];
  if (rank == UINT32_MAX) return std::nullopt;
  return rank;
}

std::optional<std::uint32_t> Topology::find_link(NodeId a, NodeId b) const {
  const auto& adj =
      degree(a) <= degree(b) ? adjacency_[a.index()] : adjacency_[b.index()];
  const NodeId target = degree(a) <= degree(b) ? b : a;
  for (const auto& inc : adj) {
    if (inc.neighbor == target) return inc.link;
  }
  return std::nullopt;
}

bool Topology::host_transit() const {
  return !taxonomy_ || taxonomy_->centricity == Centricity::ServerCentric;
}

bool operator==(const Topology& x, const Topology& y) {
  // Labels are display-only and do not survive an edge-list round trip.
  auto same = [](const Node& a, const Node& b) {
    return a.id == b.id && a.kind == b.kind && a.radix == b.radix && a.address == b.address;
  };
  return std::equal(x.nodes_.begin(), x.nodes_.end(), y.nodes_.begin(), y.nodes_.end(), same) &&
         x.links_ == y.links_;
}

NodeId TopologyBuilder::add_node(NodeKind kind, std::uint32_t radix, Address address,
                                 std::string label) {
  NodeId id(nodes_.size());
  nodes_.push_back(Node{id, kind, radix, std::move(address), std::move(label)});
  return id;
}

std::uint32_t TopologyBuilder::add_link(NodeId a, NodeId b, double capacity,
                                        std::uint32_t latency) {
  links_.push_back(Link{a, b, capacity, latency});
  return static_cast<std::uint32_t>(links_.size() - 1);
}

Topology TopologyBuilder::build(std::optional<TaxonomyRecord> taxonomy,
                                BuilderParams params) && {
  return Topology(std::move(nodes_), std::move(links_), std::move(taxonomy),
                  std::move(params));
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::RadixExceeded: return "radix exceeded";
    case ViolationKind::DuplicateLink: return "duplicate link";
    case ViolationKind::SelfLoop: return "self-loop";
    case ViolationKind::BadLinkAttributes: return "bad link attributes";
    case ViolationKind::Disconnected: return "disconnected";
    case ViolationKind::AddressInconsistent: return "address inconsistent";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

bool is_connected(const Topology& topology) {
  const std::size_t n = topology.node_count();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{NodeId(0)};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (const auto& inc : topology.neighbors(v)) {
      if (!seen[inc.neighbor.index()]) {
        seen[inc.neighbor.index()] = 1;
        ++reached;
        stack.push_back(inc.neighbor);
      }
    }
  }
  return reached == n;
}

ValidationReport validate(const Topology& topology) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string msg) {
    report.violations.push_back({kind, std::move(msg)});
  };

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen_pairs;
  for (std::size_t l = 0; l < topology.link_count(); ++l) {
    const Link& link = topology.link(static_cast<std::uint32_t>(l));
    if (link.a == link.b) {
      add(ViolationKind::SelfLoop, fmt::format("link {} loops on node {}", l, link.a.value));
      continue;
    }
    if (!(link.capacity > 0.0) || link.latency < 1) {
      add(ViolationKind::BadLinkAttributes,
          fmt::format("link {} has capacity {} latency {}", l, link.capacity, link.latency));
    }
    auto key = std::minmax(link.a.value, link.b.value);
    if (!seen_pairs.insert(key).second) {
      add(ViolationKind::DuplicateLink,
          fmt::format("link {} duplicates ({}, {})", l, key.first, key.second));
    }
  }

  for (const Node& node : topology.nodes()) {
    if (topology.degree(node.id) > node.radix) {
      add(ViolationKind::RadixExceeded,
          fmt::format("node {} has degree {} > radix {}", node.id.value,
                      topology.degree(node.id), node.radix));
    }
  }

  if (!is_connected(topology)) {
    add(ViolationKind::Disconnected, "graph has more than one component");
  }

  // Hosts sharing a scheme must share an address length and be distinct.
  std::map<AddressScheme, std::size_t> lengths;
  std::set<std::pair<AddressScheme, std::vector<std::uint32_t>>> host_addresses;
  for (NodeId h : topology.hosts()) {
    const Address& addr = topology.node(h).address;
    if (addr.digits.empty()) continue;
    auto [it, inserted] = lengths.emplace(addr.scheme, addr.digits.size());
    if (!inserted && it->second != addr.digits.size()) {
      add(ViolationKind::AddressInconsistent,
          fmt::format("host {} address has {} digits, expected {}", h.value,
                      addr.digits.size(), it->second));
    }
    if (!host_addresses.emplace(addr.scheme, addr.digits).second) {
      add(ViolationKind::AddressInconsistent,
          fmt::format("host {} repeats another host's address", h.value));
    }
  }
  return report;
}

}  // namespace dcn
