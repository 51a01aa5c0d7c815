// Copyright 2026 The dyncam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dyncam::philox {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Draw d for logical cell i is block(key, {d, i}): draws depend only on the
// (key, cell, draw) triple, never on array size or evaluation order, so
// Monte Carlo loops parallelize and resize without changing the stream.

inline constexpr std::uint32_t kMulA = 0xD2511F53u;
inline constexpr std::uint32_t kMulB = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeylA = 0x9E3779B9u;
inline constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t ctr_lo,
                                          std::uint64_t ctr_hi) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c2;
        const std::uint32_t t0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
        const std::uint32_t t1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t t2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
        const std::uint32_t t3 = static_cast<std::uint32_t>(p0);
        c0 = t0;
        c1 = t1;
        c2 = t2;
        c3 = t3;
        k0 += kWeylA;
        k1 += kWeylB;
    }
    return {c0, c1, c2, c3};
}

// Uniform in (0, 1]: 53 bits, shifted off zero so log() stays finite.
inline double to_unit(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

inline double uniform01(std::uint64_t key, std::uint64_t cell, std::uint64_t draw) {
    const auto b = block(key, draw, cell);
    return to_unit(b[0], b[1]);
}

/// Uniform in [lo, hi).
inline double uniform(std::uint64_t key, std::uint64_t cell, std::uint64_t draw, double lo,
                      double hi) {
    return lo + (hi - lo) * (uniform01(key, cell, draw) - 0x1.0p-53);
}

/// Standard normal via Box-Muller; one value per (key, cell, draw) triple.
inline double normal(std::uint64_t key, std::uint64_t cell, std::uint64_t draw) {
    const auto b = block(key, draw, cell);
    const double u1 = to_unit(b[0], b[1]);
    const double u2 = to_unit(b[2], b[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692528676655900577 * u2);
}

/// Uniform index in [0, n). Modulo bias is negligible for n << 2^64.
inline std::uint64_t uniform_index(std::uint64_t key, std::uint64_t cell, std::uint64_t draw,
                                   std::uint64_t n) {
    const auto b = block(key, draw, cell);
    const std::uint64_t w = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    return w % n;
}

}  // namespace dyncam::philox
