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

#include "kclt/gof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kclt/error.hpp"

namespace kclt {

void GofConfig::validate() const
{
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw DomainError("R must be positive");
    }
    if (grid < 2) {
        throw DomainError("grid needs at least two radii");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("alpha must lie in (0, 1]");
    }
    if (known_rho && !(*known_rho > 0.0)) {
        throw DomainError("known intensity must be positive");
    }
    if (M < 100) {
        throw DomainError("need at least 100 sup draws");
    }
}

double ks_statistic(const Curve& k, const Window& window)
{
    double sup = 0.0;
    for (std::size_t i = 0; i < k.grid.size(); ++i) {
        sup = std::max(sup, std::fabs(k.values[i] - k_poisson(k.grid[i], window.dim())));
    }
    return std::sqrt(window.volume()) * sup;
}

double ks_statistic(const PointPattern& pattern, const IntensityModel& model,
                    const RadiusGrid& grid)
{
    return ks_statistic(k_hat(pattern, model, grid), pattern.window());
}

GofCalibration::GofCalibration(const GofConfig& config)
    : config_(config), grid_(config.radius_grid())
{
    config_.validate();
    reservoir_ = std::make_shared<NormalReservoir>(config_.seed, config_.M, grid_.size());
    standard_ = simulate_sup(
        poisson_limit_covariance(grid_, 1.0, IntensityMode::estimated).matrix, *reservoir_);
}

std::pair<double, double> GofCalibration::calibrate(IntensityMode mode, double beta_hat,
                                                    double statistic) const
{
    if (!(beta_hat > 0.0)) {
        throw DomainError("zero estimated intensity");
    }
    const bool always = config_.alpha >= 1.0;
    if (mode == IntensityMode::estimated) {
        const double q = always ? -std::numeric_limits<double>::infinity()
                                : critical_value(standard_, config_.alpha) / beta_hat;
        return {q, p_value(standard_, statistic * beta_hat)};
    }
    const SupSample sample = simulate_sup(
        poisson_limit_covariance(grid_, beta_hat, IntensityMode::known).matrix, *reservoir_);
    const double q = always ? -std::numeric_limits<double>::infinity()
                            : critical_value(sample, config_.alpha);
    return {q, p_value(sample, statistic)};
}

GofResult gof_test(const PointPattern& pattern, const GofCalibration& calibration,
                   IntensityMode mode)
{
    if (pattern.dim() != 2) {
        throw DomainError("closed form available only in the plane");
    }
    const GofConfig& config = calibration.config();
    const double beta_hat = estimate_constant(pattern);
    const double rho = config.known_rho.value_or(beta_hat);

    GofResult result;
    result.grid = calibration.grid();
    result.mode = mode;
    result.beta_hat = beta_hat;
    result.statistic = ks_statistic(pattern, IntensityModel::constant(rho), result.grid);
    const auto [q, p] = calibration.calibrate(mode, beta_hat, result.statistic);
    result.critical_value = q;
    result.p_value = p;
    result.reject = result.statistic > q;
    return result;
}

GofResult gof_test(const PointPattern& pattern, const GofCalibration& calibration)
{
    return gof_test(pattern, calibration, calibration.config().mode);
}

GofResult gof_test(const PointPattern& pattern, const GofConfig& config)
{
    return gof_test(pattern, GofCalibration(config));
}

}  // namespace kclt
