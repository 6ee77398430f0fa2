// Copyright 2026 The QLAM Authors
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
/**
 * @file
 * Counter-based random streams.
 *
 * A stream is identified by a 64-bit key; the n-th output of the stream is
 * mix(key, n), so any stream can be re-created anywhere without sharing
 * generator state. Keys are derived hierarchically:
 *
 *     key = derive(base_seed, {sample_index, timestep, term_index, ...})
 *
 * which keeps per-sample, per-timestep, per-term measurement noise
 * independent of thread scheduling.
 */
#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>

namespace qlam {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t base,
                                   std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(base);
    for (const auto p : path) {
        h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// UniformRandomBitGenerator over a single keyed stream.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        return mix64(key_ ^ mix64(counter_++));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform01();
    }
    /// Uniform integer in [0, bound) by rejection (bound > 0).
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % bound;
    }

    /// Fisher-Yates; platform-independent, unlike std::shuffle.
    template <typename T> void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t counter() const noexcept {
        return counter_;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace qlam
