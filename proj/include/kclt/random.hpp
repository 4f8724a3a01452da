/*
   Copyright 2026 The kclt Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <random>

namespace kclt {

/// Master seed for a stochastic computation.
struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(Seed, Seed) = default;
};

/// Seed of the independent stream `index` derived from `seed`. Fixed rule:
/// splitmix64 finalizer applied to the seed, then to that result xor-mixed with
/// the index. Streams for distinct (seed, index) are statistically independent
/// for all practical purposes and never depend on scheduling.
Seed stream(Seed seed, std::uint64_t index);

/// Random source built on mt19937_64 with platform-independent variates (the
/// std:: distributions are implementation-defined and would break byte-level
/// reproducibility across standard libraries).
class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed.value) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal (Marsaglia polar method; the second variate is cached).
    double normal();

    /// Poisson(mean). Inversion for mean < 30, PTRS transformed rejection above.
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace kclt
