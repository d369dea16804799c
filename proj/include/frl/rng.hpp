// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace frl {

// Counter-based generator: identical output for a given (seed, purpose,
// sample, block) regardless of thread count or evaluation order.
namespace philox {

// Philox4x32, 10 rounds.
std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                   const std::array<std::uint32_t, 2>& key);

// Keying scheme used throughout: key <- split 64-bit seed,
// counter <- [block_index, purpose, sample_lo, sample_hi].
std::array<std::uint32_t, 4> stream_block(std::uint64_t seed, std::uint64_t sample,
                                          std::uint32_t purpose, std::uint32_t block_index);

}  // namespace philox

// Stream purposes keep unrelated draws from colliding; one per subsystem.
enum class StreamPurpose : std::uint32_t {
    PathNoise = 1,
    Diagnostics = 2,
};

double u64_to_unit_double(std::uint64_t x);  // strictly inside (0,1)

// Sequential standard normals for one (seed, purpose, sample) substream.
// Each counter block yields two normals via Box-Muller.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t sample)
        : seed_(seed), sample_(sample), purpose_(static_cast<std::uint32_t>(purpose)) {}

    double next();

  private:
    std::uint64_t seed_;
    std::uint64_t sample_;
    std::uint32_t purpose_;
    std::uint32_t block_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace frl
