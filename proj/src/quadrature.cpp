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

#include "kclt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "kclt/error.hpp"

namespace kclt {

namespace {

std::vector<std::uint32_t> first_primes(std::size_t count)
{
    std::vector<std::uint32_t> primes;
    for (std::uint32_t c = 2; primes.size() < count; ++c) {
        bool prime = true;
        for (std::uint32_t q : primes) {
            if (q * q > c) {
                break;
            }
            if (c % q == 0) {
                prime = false;
                break;
            }
        }
        if (prime) {
            primes.push_back(c);
        }
    }
    return primes;
}

constexpr std::size_t block_size = 4096;

// Halton points are reused by every block integral of a covariance run.
std::shared_ptr<const std::vector<double>> halton_table(std::size_t dims, std::size_t samples);

}  // namespace

HaltonSequence::HaltonSequence(std::size_t dims) : bases_(first_primes(dims))
{
    if (dims == 0) {
        throw DomainError("Halton sequence needs at least one dimension");
    }
}

void HaltonSequence::point(std::uint64_t index, std::span<double> out) const
{
    for (std::size_t k = 0; k < bases_.size(); ++k) {
        const std::uint64_t base = bases_[k];
        const double inv_base = 1.0 / static_cast<double>(base);
        std::uint64_t i = index + 1;
        double factor = inv_base;
        double value = 0.0;
        while (i > 0) {
            value += factor * static_cast<double>(i % base);
            i /= base;
            factor *= inv_base;
        }
        out[k] = value;
    }
}

double QmcMean::error(std::size_t k) const
{
    return std::fabs(full[k] - half[k]);
}

namespace {

std::shared_ptr<const std::vector<double>> halton_table(std::size_t dims, std::size_t samples)
{
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const std::vector<double>>>
        cache;
    const std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{dims, samples}];
    if (!slot) {
        const HaltonSequence halton(dims);
        auto table = std::make_shared<std::vector<double>>(dims * samples);
        for (std::size_t i = 0; i < samples; ++i) {
            halton.point(i, {table->data() + i * dims, dims});
        }
        slot = std::move(table);
    }
    return slot;
}

}  // namespace

QmcMean qmc_mean(std::size_t dims, std::size_t samples, std::size_t outputs, const QmcIntegrand& f)
{
    if (samples < 2) {
        throw DomainError("quadrature needs at least two samples");
    }
    const auto table = halton_table(dims, samples);
    const double* points = table->data();
    const std::size_t half_samples = samples / 2;
    const std::size_t blocks = (samples + block_size - 1) / block_size;
    // Per block: sums over the indices below and at/above the half mark.
    std::vector<double> lower(blocks * outputs, 0.0);
    std::vector<double> upper(blocks * outputs, 0.0);
    bool failed = false;

#pragma omp parallel for schedule(dynamic, 1) reduction(|| : failed)
    for (std::size_t b = 0; b < blocks; ++b) {
        std::vector<double> value(outputs);
        const std::size_t begin = b * block_size;
        const std::size_t end = std::min(samples, begin + block_size);
        double* lo = lower.data() + b * outputs;
        double* hi = upper.data() + b * outputs;
        for (std::size_t i = begin; i < end; ++i) {
            std::fill(value.begin(), value.end(), 0.0);
            f({points + i * dims, dims}, value);
            double* dst = i < half_samples ? lo : hi;
            for (std::size_t k = 0; k < outputs; ++k) {
                if (!std::isfinite(value[k])) {
                    failed = true;
                }
                dst[k] += value[k];
            }
        }
    }
    if (failed) {
        throw DomainError("model evaluation failed");
    }

    QmcMean out{std::vector<double>(outputs, 0.0), std::vector<double>(outputs, 0.0)};
    for (std::size_t k = 0; k < outputs; ++k) {
        double first = 0.0;
        double second = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            first += lower[b * outputs + k];
            second += upper[b * outputs + k];
        }
        out.half[k] = first / static_cast<double>(half_samples);
        out.full[k] = (first + second) / static_cast<double>(samples);
    }
    return out;
}

}  // namespace kclt
