#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcn/rng.hpp"

namespace dcn {

enum class PatternKind { UniformRandom, BitComplement, BitReverse, Tornado, Permutation };

struct TrafficPattern {
  PatternKind kind = PatternKind::UniformRandom;
  std::vector<std::uint32_t> permutation;  // Permutation only: src -> dst

  static TrafficPattern uniform() { return {PatternKind::UniformRandom, {}}; }
  static TrafficPattern complement() { return {PatternKind::BitComplement, {}}; }
  static TrafficPattern reverse() { return {PatternKind::BitReverse, {}}; }
  static TrafficPattern tornado() { return {PatternKind::Tornado, {}}; }
  static TrafficPattern from_map(std::vector<std::uint32_t> map) {
    return {PatternKind::Permutation, std::move(map)};
  }

  bool needs_power_of_two() const {
    return kind == PatternKind::BitComplement || kind == PatternKind::BitReverse;
  }
  /// Every source has one fixed destination.
  bool deterministic() const { return kind != PatternKind::UniformRandom; }
};

/// "uniform", "complement", "reverse", "tornado", or "permutation".
std::string to_string(const TrafficPattern& pattern);
/// Accepts the names above except "permutation".
TrafficPattern parse_pattern(const std::string& name);

/// log2(n) for a power of two n >= 2; throws std::invalid_argument otherwise.
std::uint32_t address_bits(std::uint32_t n);

/// Destination host index for `src` among `n` participants. Bit patterns need
/// n == 2^bits. nullopt when the pattern maps src onto itself (bit-reversal
/// palindromes, tornado with n == 2), meaning src sends nothing.
std::optional<std::uint32_t> pattern_destination(const TrafficPattern& pattern, std::uint32_t src,
                                                 std::uint32_t n, std::uint32_t bits, Rng& rng);

/// Host indices taking part in a pattern over `host_count` hosts. Bit
/// patterns use the first 2^floor(log2 H) hosts; the rest use all hosts.
std::vector<std::uint32_t> pattern_participants(const TrafficPattern& pattern,
                                                std::size_t host_count);

}  // namespace dcn
