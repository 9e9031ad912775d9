#pragma once

#include <cstdint>
#include <random>

namespace hopcap {

using Rng = std::mt19937_64;

// Stream tags keep the random streams of different pipeline stages
// independent for the same user seed.
enum class Stream : std::uint32_t {
  deployment = 1,
  tessellation_candidates = 2,
  tessellation_probes = 3,
  connections = 4,
  relays = 5,
  routing = 6,
  injection = 7,
  reception = 8,
  reservoir = 9,
  certificate = 10,
  saturation = 11,
};

inline Rng make_rng(std::uint64_t seed, Stream stream,
                    std::uint64_t substream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(substream),
                    static_cast<std::uint32_t>(substream >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace hopcap
