// Copyright 2026 The Ambig-ICL Authors.
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

#include <cstddef>
#include <cstdint>

namespace ambig {

/// Uniform integer in [0, bound) drawn from a 64-bit engine by rejection
/// sampling. Unlike std::uniform_int_distribution the sequence is fixed by
/// the engine alone, so shuffles are identical across standard libraries.
template <class Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t draw;
    do {
        draw = static_cast<std::uint64_t>(engine());
    } while (draw >= limit);
    return draw % bound;
}

/// Counter-based standard normal: a pure function of (seed, key, counter).
double counter_gaussian(std::uint64_t seed, std::uint64_t key, std::uint64_t counter);

}  // namespace ambig
