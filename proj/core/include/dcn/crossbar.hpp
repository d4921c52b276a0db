#pragma once

#include <cstdint>

namespace dcn {

enum class CrossbarQueueing { InputFifo, OutputQueued };

/// Saturated N x N crossbar: every input always holds traffic for uniformly
/// random outputs, each output delivers at most one packet per cycle.
/// InputFifo keeps one FIFO per input with random grants per output, so a
/// blocked head stalls its queue. OutputQueued moves every arrival straight
/// to an unbounded queue at its output. Returns delivered / offered.
double crossbar_saturation_micro(std::uint32_t ports, std::uint64_t cycles, std::uint64_t seed,
                                 CrossbarQueueing queueing = CrossbarQueueing::InputFifo);

}  // namespace dcn
