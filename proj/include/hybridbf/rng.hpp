// SPDX-License-Identifier: Apache-2.0
//
// hybridbf: link-level simulation of hybrid analog-digital precoding with
// S-parameter-based models of the analog RF beamforming network
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace hybridbf
{

// ------------------------------- PHILOX CORE -------------------------------

// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw, "Parallel Random
// Numbers: As Easy as 1, 2, 3", SC'11): maps a 128-bit counter and a 64-bit
// key to 128 pseudo-random bits. Counter-based, so any block of the stream is
// addressable in O(1), which makes per-realization substreams trivially
// reproducible across platforms and thread counts. The transcription below is
// checked against the published reference test vectors in tests/test_rng.cpp.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                                  std::array<std::uint32_t, 2> key)
{
    constexpr std::uint32_t mul0 = 0xD2511F53u;
    constexpr std::uint32_t mul1 = 0xCD9E8D57u;
    constexpr std::uint32_t weyl0 = 0x9E3779B9u; // golden ratio fraction
    constexpr std::uint32_t weyl1 = 0xBB67AE85u; // sqrt(3) - 1 fraction

    for (int round = 0; round < 10; ++round)
    {
        if (round > 0)
        {
            key[0] += weyl0;
            key[1] += weyl1;
        }
        const std::uint64_t product0 = std::uint64_t(mul0) * counter[0];
        const std::uint64_t product1 = std::uint64_t(mul1) * counter[2];
        counter = {std::uint32_t(product1 >> 32) ^ counter[1] ^ key[0],
                   std::uint32_t(product1),
                   std::uint32_t(product0 >> 32) ^ counter[3] ^ key[1],
                   std::uint32_t(product0)};
    }
    return counter;
}

// SplitMix64 finalizer (Steele, Lea, Flood, "Fast Splittable Pseudorandom
// Number Generators"). Derives statistically independent substream seeds from
// a master seed and a substream index; used by the Monte-Carlo harness to give
// every channel realization its own seed while keeping realizations matched
// across operating points and architectures (common random numbers).
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index)
{
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (stream_index + 1ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// ------------------------------ STREAM WRAPPER ------------------------------

// Sequential view over Philox blocks. The 64-bit seed forms the Philox key;
// counter words 2..3 carry an optional stream id and words 0..1 the running
// block index. Instances are cheap value types; one per realization.
class CounterRng
{
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          stream_lo_(std::uint32_t(stream)),
          stream_hi_(std::uint32_t(stream >> 32))
    {
    }

    std::uint32_t next_u32()
    {
        if (position_ == 4)
        {
            buffer_ = philox4x32_10({std::uint32_t(block_), std::uint32_t(block_ >> 32), stream_lo_, stream_hi_}, key_);
            ++block_;
            position_ = 0;
        }
        return buffer_[std::size_t(position_++)];
    }

    // Uniform double on (0, 1]: 53 random mantissa bits, shifted away from 0
    // so that log() in the Gaussian transform below is always finite.
    double next_unit_double()
    {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        const std::uint64_t bits53 = ((hi << 32) | lo) >> 11;
        return double(bits53 + 1ull) * 0x1.0p-53;
    }

    // Circularly-symmetric complex Gaussian with unit variance per complex
    // entry (real and imaginary parts i.i.d. with variance 1/2), generated in
    // amplitude-phase form: |z|^2 ~ Exp(1), arg(z) ~ U(0, 2*pi). Deterministic
    // draw count (two uniforms per sample), no rejection loop.
    std::complex<double> next_cgauss()
    {
        const double u_amplitude = next_unit_double();
        const double u_phase = next_unit_double();
        const double amplitude = std::sqrt(-std::log(u_amplitude));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::polar(amplitude, two_pi * u_phase);
    }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_ = 0;
    std::uint32_t stream_hi_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int position_ = 4;
};

} // namespace hybridbf
