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
#include <vector>

#include <Eigen/Dense>

#include "kclt/asymcov.hpp"
#include "kclt/random.hpp"

namespace kclt {

/// A fixed pool of standard normal vectors, reusable against any covariance of
/// matching dimension. Draws are generated in blocks of `block_draws`, block b
/// from stream(seed, b), so the pool does not depend on the thread count.
class NormalReservoir {
public:
    static constexpr std::size_t block_draws = 256;

    NormalReservoir(Seed seed, std::size_t draws, std::size_t dim);

    Seed seed() const { return seed_; }
    std::size_t draws() const { return draws_; }
    std::size_t dim() const { return dim_; }
    std::size_t blocks() const { return blocks_.size(); }

    /// Block b laid out as [k * block_draws + lane].
    const std::vector<double>& block(std::size_t b) const { return blocks_[b]; }

private:
    Seed seed_;
    std::size_t draws_;
    std::size_t dim_;
    std::vector<std::vector<double>> blocks_;
};

/// Sorted draws of max_j |Z(r_j)| for Z ~ N(0, covariance).
struct SupSample {
    std::vector<double> draws;
    Eigen::MatrixXd covariance;
    Seed seed;
    double jitter = 0.0;  ///< relative jitter that made the factorization succeed
};

/// Lower Cholesky factor (row-major, m x m) of cov + eps * maxdiag * I with eps
/// escalating from 1e-10 to 1e-6. Sets `jitter` to the eps used.
std::vector<double> jittered_cholesky(const Eigen::MatrixXd& cov, double* jitter = nullptr);

SupSample simulate_sup(const Eigen::MatrixXd& cov, const NormalReservoir& reservoir);
SupSample simulate_sup(const Eigen::MatrixXd& cov, std::size_t draws, Seed seed);
SupSample simulate_sup(const LimitCovariance& cov, std::size_t draws, Seed seed);

/// k-th smallest draw with k = ceil((1 - alpha) M).
double critical_value(const SupSample& sample, double alpha);

/// (1 + #{draws >= statistic}) / (M + 1).
double p_value(const SupSample& sample, double statistic);

}  // namespace kclt
