// Copyright 2026 The recurlab Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "recurlab/common.hpp"

namespace recurlab {

uint64_t splitmix64(uint64_t x);

/// Derive an independent stream seed from a master seed and a component
/// label. Adding a component never perturbs the streams of others.
uint64_t derive_seed(uint64_t master, std::string_view label);
uint64_t derive_seed(uint64_t master, uint64_t index);

/// Seeded generator with the uniform/normal helpers used across the
/// library. Same seed, same sequence, on every platform we build on.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (spare cached).
    double normal();

    /// Entries of a Ginibre matrix: re and im each standard normal.
    Complex complex_normal() { return {normal(), normal()}; }

    /// Uniform index in [0, n).
    uint64_t uniform_index(uint64_t n);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace recurlab
