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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kclt {

/// Halton low-discrepancy points in [0,1)^dims; axis k uses the k-th prime.
/// Index 0 (the origin) is skipped, so point(i) is the (i+1)-th Halton point.
class HaltonSequence {
public:
    explicit HaltonSequence(std::size_t dims);

    std::size_t dims() const { return bases_.size(); }
    void point(std::uint64_t index, std::span<double> out) const;

private:
    std::vector<std::uint32_t> bases_;
};

/// Quasi-Monte Carlo mean of a vector-valued integrand with an embedded error
/// estimate.
struct QmcMean {
    std::vector<double> full;  ///< mean over all samples
    std::vector<double> half;  ///< mean over the first half of the samples

    double error(std::size_t k) const;
};

/// Integrand: unit-cube point in, `outputs` values written to the span.
using QmcIntegrand = std::function<void(std::span<const double> unit, std::span<double> out)>;

/// Averages `f` over the first `samples` Halton points. Samples are reduced in
/// fixed blocks in index order, so the result does not depend on the number of
/// threads.
QmcMean qmc_mean(std::size_t dims, std::size_t samples, std::size_t outputs, const QmcIntegrand& f);

}  // namespace kclt
