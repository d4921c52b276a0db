#pragma once

#include <string>
#include <string_view>

#include "dcn/topology.hpp"

namespace dcn {

/// Line-oriented text form of a topology:
///
///   node <id> <host|switch> <radix> <scheme>:<d0.d1...|->
///   link <a> <b> <capacity> <latency>
///
/// Nodes come first in id order, links follow in insertion order. Capacities
/// carry at most six decimals. Lines end in '\n' without trailing blanks.
std::string export_edge_list(const Topology& topology);

struct ImportedTopology {
  Topology topology;
  ValidationReport report;
};

/// Parses export_edge_list output. Blank lines and '#' comments are skipped.
/// Throws ParseError naming the offending line; structural problems (duplicate
/// links, radix overflow, disconnection) land in `report` instead.
ImportedTopology import_edge_list(std::string_view text);

/// Six decimals, trailing zeros trimmed down to one ("1.0", "0.25").
std::string format_real(double value);

}  // namespace dcn
