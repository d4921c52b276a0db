#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace dcn {

__extension__ using uint128_t = unsigned __int128;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for an independent sub-experiment (trial, sweep point, restart).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

/// mt19937_64 with its own integer/real mappings. The standard distributions
/// are implementation-defined, which would break byte-reproducibility across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform(std::uint64_t n) {
    // Lemire's nearly-divisionless rejection.
    std::uint64_t x = engine_();
    uint128_t m = static_cast<uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = -n % n;
      while (low < threshold) {
        x = engine_();
        m = static_cast<uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1).
  double real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return real() < p; }

  template <typename Vec>
  void shuffle(Vec& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      using std::swap;
      swap(v[i - 1], v[uniform(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dcn
