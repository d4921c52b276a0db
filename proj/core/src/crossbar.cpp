#include "dcn/crossbar.hpp"

#include <stdexcept>
#include <vector>

#include "dcn/rng.hpp"

namespace dcn {

double crossbar_saturation_micro(std::uint32_t ports, std::uint64_t cycles, std::uint64_t seed,
                                 CrossbarQueueing queueing) {
  if (ports < 2) throw std::invalid_argument("crossbar needs at least two ports");
  if (cycles == 0) throw std::invalid_argument("crossbar needs at least one cycle");
  Rng rng(seed);
  std::uint64_t delivered = 0;

  if (queueing == CrossbarQueueing::OutputQueued) {
    std::vector<std::uint64_t> backlog(ports, 0);
    for (std::uint64_t c = 0; c < cycles; ++c) {
      for (std::uint32_t i = 0; i < ports; ++i) ++backlog[rng.uniform(ports)];
      for (auto& q : backlog) {
        if (q > 0) {
          --q;
          ++delivered;
        }
      }
    }
  } else {
    // Only the heads matter under saturation: a served head is replaced by a
    // fresh packet with a new random output.
    std::vector<std::uint32_t> head(ports);
    for (auto& h : head) h = static_cast<std::uint32_t>(rng.uniform(ports));
    std::vector<std::vector<std::uint32_t>> contenders(ports);
    for (std::uint64_t c = 0; c < cycles; ++c) {
      for (auto& v : contenders) v.clear();
      for (std::uint32_t i = 0; i < ports; ++i) contenders[head[i]].push_back(i);
      for (std::uint32_t o = 0; o < ports; ++o) {
        const auto& v = contenders[o];
        if (v.empty()) continue;
        const std::uint32_t winner = v[rng.uniform(v.size())];
        head[winner] = static_cast<std::uint32_t>(rng.uniform(ports));
        ++delivered;
      }
    }
  }
  return static_cast<double>(delivered) / (static_cast<double>(ports) * static_cast<double>(cycles));
}

}  // namespace dcn
