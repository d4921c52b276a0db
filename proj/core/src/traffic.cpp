#include "dcn/traffic.hpp"

#include <bit>
#include <stdexcept>

#include <fmt/core.h>

namespace dcn {

std::string to_string(const TrafficPattern& pattern) {
  switch (pattern.kind) {
    case PatternKind::UniformRandom: return "uniform";
    case PatternKind::BitComplement: return "complement";
    case PatternKind::BitReverse: return "reverse";
    case PatternKind::Tornado: return "tornado";
    case PatternKind::Permutation: return "permutation";
  }
  return "uniform";
}

TrafficPattern parse_pattern(const std::string& name) {
  if (name == "uniform" || name == "uniform-random") return TrafficPattern::uniform();
  if (name == "complement" || name == "bit-complement") return TrafficPattern::complement();
  if (name == "reverse" || name == "bit-reverse") return TrafficPattern::reverse();
  if (name == "tornado") return TrafficPattern::tornado();
  throw std::invalid_argument(
      fmt::format("unknown traffic pattern '{}' (uniform, complement, reverse, tornado)", name));
}

std::uint32_t address_bits(std::uint32_t n) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw std::invalid_argument(fmt::format("bit patterns need a power-of-two host count, got {}", n));
  }
  return static_cast<std::uint32_t>(std::countr_zero(n));
}

std::optional<std::uint32_t> pattern_destination(const TrafficPattern& pattern, std::uint32_t src,
                                                 std::uint32_t n, std::uint32_t bits, Rng& rng) {
  if (n < 2) throw std::invalid_argument("traffic needs at least two hosts");
  if (src >= n) throw std::invalid_argument(fmt::format("source {} outside [0, {})", src, n));
  std::uint32_t dst = src;
  switch (pattern.kind) {
    case PatternKind::UniformRandom:
      dst = static_cast<std::uint32_t>(rng.uniform(n - 1));
      if (dst >= src) ++dst;
      break;
    case PatternKind::BitComplement:
    case PatternKind::BitReverse: {
      if (n != (1u << bits) || bits == 0) {
        throw std::invalid_argument(fmt::format("bit pattern needs n = 2^bits, got n={} bits={}", n, bits));
      }
      if (pattern.kind == PatternKind::BitComplement) {
        dst = ~src & (n - 1);
      } else {
        dst = 0;
        for (std::uint32_t b = 0; b < bits; ++b)
          if (src & (1u << b)) dst |= 1u << (bits - 1 - b);
      }
      break;
    }
    case PatternKind::Tornado:
      dst = (src + (n - 1) / 2) % n;
      break;
    case PatternKind::Permutation:
      if (pattern.permutation.size() != n) {
        throw std::invalid_argument("permutation size differs from host count");
      }
      dst = pattern.permutation[src];
      if (dst >= n) throw std::invalid_argument("permutation maps outside the host range");
      break;
  }
  if (dst == src) return std::nullopt;
  return dst;
}

std::vector<std::uint32_t> pattern_participants(const TrafficPattern& pattern,
                                                std::size_t host_count) {
  std::size_t n = host_count;
  if (pattern.needs_power_of_two() && n >= 2) n = std::bit_floor(n);
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint32_t>(i);
  return out;
}

}  // namespace dcn
