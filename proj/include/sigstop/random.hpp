#pragma once

#include <cstdint>
#include <random>

namespace sigstop {

// Independent generator for (seed, stream). Sample m of a batch always uses
// stream m, so results do not depend on evaluation order.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x5167u};
    return std::mt19937_64(seq);
}

// Stream ids used by the library so that, e.g., training and test draws never collide.
namespace streams {
inline constexpr std::uint64_t kPolicyInit = 0xA11CEull << 32;
inline constexpr std::uint64_t kBootstrap = 0xB007ull << 32;
}  // namespace streams

}  // namespace sigstop
