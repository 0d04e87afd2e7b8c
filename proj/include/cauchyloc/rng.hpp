// Copyright 2026 The cauchyloc authors
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
 * Counter-based deterministic RNG. Each draw is a pure function of
 * (seed, stream, counter), so parallel consumers with distinct streams
 * produce the same values regardless of scheduling.
 */

#pragma once

#include <cstdint>

namespace cauchyloc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(detail::splitmix64(seed ^ detail::splitmix64(stream * 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return detail::splitmix64(key_ ^ detail::splitmix64(counter));
    }

    /// Uniform double in [0, 1) from the top 53 bits of the hash.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }

  private:
    std::uint64_t key_;
};

} // namespace cauchyloc
