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
#include <memory>
#include <optional>

#include "kclt/asymcov.hpp"
#include "kclt/geometry.hpp"
#include "kclt/intensity.hpp"
#include "kclt/kstat.hpp"
#include "kclt/limitlaw.hpp"
#include "kclt/random.hpp"

namespace kclt {

struct GofConfig {
    double R = 0.05;
    std::size_t grid = 50;
    /// In (0, 1]; alpha = 1 rejects unconditionally.
    double alpha = 0.05;
    /// Which null covariance calibrates the test.
    IntensityMode mode = IntensityMode::estimated;
    /// Intensity plugged into K_hat. Unset: the estimate N/|W| (both modes).
    std::optional<double> known_rho;
    std::size_t M = 10000;
    Seed seed{};

    void validate() const;
    RadiusGrid radius_grid() const { return RadiusGrid::uniform(R, grid); }
};

struct GofResult {
    double statistic = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double beta_hat = 0.0;
    RadiusGrid grid = RadiusGrid::uniform(1.0, 2);
    IntensityMode mode = IntensityMode::estimated;
};

/// sqrt(|W|) * max over the grid of |K_hat(r) - K_poisson(r)|.
double ks_statistic(const PointPattern& pattern, const IntensityModel& model,
                    const RadiusGrid& grid);
double ks_statistic(const Curve& k, const Window& window);

/// Null-law tables shared by many tests with the same grid, M and seed.
///
/// The estimated-intensity Poisson covariance 2 pi (s^t)^2 / rho^2 scales as
/// rho^-2, so one sup sample at rho = 1 serves every beta_hat: the critical
/// value at beta_hat is standard / beta_hat. The known-intensity covariance
/// needs a fresh factor per beta_hat, drawn against the same normal reservoir.
class GofCalibration {
public:
    explicit GofCalibration(const GofConfig& config);

    const GofConfig& config() const { return config_; }
    const RadiusGrid& grid() const { return grid_; }
    const SupSample& standard_sample() const { return standard_; }

    /// Critical value and p-value of `statistic` under `mode` at `beta_hat`.
    std::pair<double, double> calibrate(IntensityMode mode, double beta_hat,
                                        double statistic) const;

private:
    GofConfig config_;
    RadiusGrid grid_;
    std::shared_ptr<const NormalReservoir> reservoir_;
    SupSample standard_;
};

/// Kolmogorov-Smirnov test of the homogeneous Poisson null in the plane.
GofResult gof_test(const PointPattern& pattern, const GofConfig& config);
GofResult gof_test(const PointPattern& pattern, const GofCalibration& calibration);

/// Test under `mode` reusing a calibration built for either mode.
GofResult gof_test(const PointPattern& pattern, const GofCalibration& calibration,
                   IntensityMode mode);

}  // namespace kclt
