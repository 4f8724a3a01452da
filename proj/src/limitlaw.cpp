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

#include "kclt/limitlaw.hpp"

#include <algorithm>
#include <cmath>

#include "kclt/error.hpp"
#include "kclt/simd/kernels.hpp"

namespace kclt {

namespace {

constexpr std::size_t min_draws = 100;

}  // namespace

NormalReservoir::NormalReservoir(Seed seed, std::size_t draws, std::size_t dim)
    : seed_(seed), draws_(draws), dim_(dim)
{
    if (draws < min_draws) {
        throw DomainError("need at least 100 sup draws");
    }
    if (dim == 0) {
        throw DomainError("reservoir dimension must be positive");
    }
    const std::size_t nblocks = (draws + block_draws - 1) / block_draws;
    blocks_.resize(nblocks);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < nblocks; ++b) {
        Rng rng(stream(seed, b));
        std::vector<double> block(dim * block_draws);
        // Lane-major generation keeps a draw's vector contiguous in the stream.
        for (std::size_t lane = 0; lane < block_draws; ++lane) {
            for (std::size_t k = 0; k < dim; ++k) {
                block[k * block_draws + lane] = rng.normal();
            }
        }
        blocks_[b] = std::move(block);
    }
}

std::vector<double> jittered_cholesky(const Eigen::MatrixXd& cov, double* jitter)
{
    const Eigen::Index m = cov.rows();
    if (m == 0 || cov.cols() != m) {
        throw DomainError("covariance must be a nonempty square matrix");
    }
    if (!cov.allFinite()) {
        throw DomainError("covariance has non-finite entries");
    }
    const double scale = cov.diagonal().cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) {
        throw DomainError("covariance not numerically PSD");
    }
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    for (double eps = 1e-10; eps <= 1.0000001e-6; eps *= 10.0) {
        Eigen::MatrixXd a = sym;
        a.diagonal().array() += eps * scale;
        const Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() != Eigen::Success) {
            continue;
        }
        const Eigen::MatrixXd l = llt.matrixL();
        bool ok = true;
        for (Eigen::Index i = 0; i < m; ++i) {
            ok = ok && l(i, i) > 0.0 && std::isfinite(l(i, i));
        }
        if (!ok) {
            continue;
        }
        if (jitter != nullptr) {
            *jitter = eps;
        }
        std::vector<double> out(static_cast<std::size_t>(m * m), 0.0);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index k = 0; k <= i; ++k) {
                out[static_cast<std::size_t>(i * m + k)] = l(i, k);
            }
        }
        return out;
    }
    throw DomainError("covariance not numerically PSD");
}

SupSample simulate_sup(const Eigen::MatrixXd& cov, const NormalReservoir& reservoir)
{
    const auto m = static_cast<std::size_t>(cov.rows());
    if (reservoir.dim() != m) {
        throw DomainError("reservoir dimension does not match covariance");
    }
    SupSample out;
    out.covariance = cov;
    out.seed = reservoir.seed();
    const std::vector<double> lower = jittered_cholesky(cov, &out.jitter);
    const auto& kern = simd::kernels();

    constexpr std::size_t bd = NormalReservoir::block_draws;
    std::vector<double> all(reservoir.blocks() * bd);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < reservoir.blocks(); ++b) {
        kern.sup_abs_lower(lower.data(), m, reservoir.block(b).data(), bd, all.data() + b * bd);
    }
    all.resize(reservoir.draws());
    std::sort(all.begin(), all.end());
    out.draws = std::move(all);
    return out;
}

SupSample simulate_sup(const Eigen::MatrixXd& cov, std::size_t draws, Seed seed)
{
    const NormalReservoir reservoir(seed, draws, static_cast<std::size_t>(cov.rows()));
    return simulate_sup(cov, reservoir);
}

SupSample simulate_sup(const LimitCovariance& cov, std::size_t draws, Seed seed)
{
    return simulate_sup(cov.matrix, draws, seed);
}

double critical_value(const SupSample& sample, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0, 1)");
    }
    const std::size_t m = sample.draws.size();
    if (m == 0) {
        throw DomainError("empty sup sample");
    }
    // The tolerance absorbs rounding in (1 - alpha) * M for exact products.
    const double target = std::ceil((1.0 - alpha) * static_cast<double>(m) - 1e-9);
    const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(target, 1.0)), 1, m);
    return sample.draws[k - 1];
}

double p_value(const SupSample& sample, double statistic)
{
    const auto first = std::lower_bound(sample.draws.begin(), sample.draws.end(), statistic);
    const auto exceed = static_cast<double>(sample.draws.end() - first);
    return (1.0 + exceed) / (static_cast<double>(sample.draws.size()) + 1.0);
}

}  // namespace kclt
