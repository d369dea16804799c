// SPDX-License-Identifier: Apache-2.0
#include "frl/rng.hpp"

#include <cmath>
#include <numbers>

namespace frl {
namespace philox {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
}
}  // namespace

std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                   const std::array<std::uint32_t, 2>& key) {
    auto c = counter;
    auto k = key;
    for (int r = 0; r < 10; ++r) round_once(c, k);
    return c;
}

std::array<std::uint32_t, 4> stream_block(std::uint64_t seed, std::uint64_t sample,
                                          std::uint32_t purpose, std::uint32_t block_index) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const std::array<std::uint32_t, 4> ctr = {block_index, purpose,
                                              static_cast<std::uint32_t>(sample),
                                              static_cast<std::uint32_t>(sample >> 32)};
    return block(ctr, key);
}

}  // namespace philox

double u64_to_unit_double(std::uint64_t x) {
    // 52 bits so the half-ulp offset stays exact; range [2^-53, 1 - 2^-53]
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

double NormalStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const auto w = philox::stream_block(seed_, sample_, purpose_, block_++);
    const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
    const double u1 = u64_to_unit_double(a);
    const double u2 = u64_to_unit_double(b);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

}  // namespace frl
