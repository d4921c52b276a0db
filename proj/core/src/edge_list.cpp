#include "dcn/edge_list.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include <fmt/core.h>

#include "dcn/errors.hpp"

namespace dcn {
namespace {

constexpr std::string_view scheme_token(AddressScheme s) {
  switch (s) {
    case AddressScheme::FatTreePod: return "fattree";
    case AddressScheme::DCellCoord: return "dcell";
    case AddressScheme::BCubeDigits: return "bcube";
    case AddressScheme::Flat: return "flat";
  }
  return "flat";
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_uint(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, fmt::format("bad {} '{}'", what, tok));
  }
  return value;
}

double parse_double(std::string_view tok, std::size_t line) {
  // from_chars for double is missing in libstdc++ 11.
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, fmt::format("bad capacity '{}'", tok));
  }
  return v;
}

Address parse_address(std::string_view tok, std::size_t line) {
  const auto colon = tok.find(':');
  if (colon == std::string_view::npos) throw ParseError(line, "address needs '<scheme>:'");
  const auto scheme = tok.substr(0, colon);
  Address addr;
  if (scheme == "fattree") addr.scheme = AddressScheme::FatTreePod;
  else if (scheme == "dcell") addr.scheme = AddressScheme::DCellCoord;
  else if (scheme == "bcube") addr.scheme = AddressScheme::BCubeDigits;
  else if (scheme == "flat") addr.scheme = AddressScheme::Flat;
  else throw ParseError(line, fmt::format("unknown address scheme '{}'", scheme));

  auto digits = tok.substr(colon + 1);
  if (digits == "-") return addr;
  while (true) {
    const auto dot = digits.find('.');
    addr.digits.push_back(parse_uint<std::uint32_t>(digits.substr(0, dot), line, "address digit"));
    if (dot == std::string_view::npos) break;
    digits = digits.substr(dot + 1);
  }
  return addr;
}

}  // namespace

std::string format_real(double value) {
  std::string s = fmt::format("{:.6f}", value);
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string export_edge_list(const Topology& topology) {
  std::string out;
  for (const Node& node : topology.nodes()) {
    out += fmt::format("node {} {} {} {}:", node.id.value, node.is_host() ? "host" : "switch",
                       node.radix, scheme_token(node.address.scheme));
    if (node.address.digits.empty()) {
      out += '-';
    } else {
      for (std::size_t i = 0; i < node.address.digits.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(node.address.digits[i]);
      }
    }
    out += '\n';
  }
  for (const Link& link : topology.links()) {
    out += fmt::format("link {} {} {} {}\n", link.a.value, link.b.value,
                       format_real(link.capacity), link.latency);
  }
  return out;
}

ImportedTopology import_edge_list(std::string_view text) {
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;

    if (tokens[0] == "node") {
      if (tokens.size() != 5) throw ParseError(line_no, "node line needs 4 fields");
      if (!links.empty()) throw ParseError(line_no, "node line after link lines");
      const auto id = parse_uint<std::uint32_t>(tokens[1], line_no, "node id");
      if (id != nodes.size()) {
        throw ParseError(line_no, fmt::format("expected node id {}, got {}", nodes.size(), id));
      }
      Node node;
      node.id = NodeId(id);
      if (tokens[2] == "host") node.kind = NodeKind::Host;
      else if (tokens[2] == "switch") node.kind = NodeKind::Switch;
      else throw ParseError(line_no, fmt::format("unknown node kind '{}'", tokens[2]));
      node.radix = parse_uint<std::uint32_t>(tokens[3], line_no, "radix");
      node.address = parse_address(tokens[4], line_no);
      nodes.push_back(std::move(node));
    } else if (tokens[0] == "link") {
      if (tokens.size() != 5) throw ParseError(line_no, "link line needs 4 fields");
      Link link;
      link.a = NodeId(parse_uint<std::uint32_t>(tokens[1], line_no, "endpoint"));
      link.b = NodeId(parse_uint<std::uint32_t>(tokens[2], line_no, "endpoint"));
      if (link.a.index() >= nodes.size() || link.b.index() >= nodes.size()) {
        throw ParseError(line_no, "link references an undeclared node");
      }
      link.capacity = parse_double(tokens[3], line_no);
      link.latency = parse_uint<std::uint32_t>(tokens[4], line_no, "latency");
      links.push_back(link);
    } else {
      throw ParseError(line_no, fmt::format("unknown record '{}'", tokens[0]));
    }
  }
  Topology topology(std::move(nodes), std::move(links), std::nullopt, ImportedParams{});
  ValidationReport report = validate(topology);
  return {std::move(topology), std::move(report)};
}

}  // namespace dcn
