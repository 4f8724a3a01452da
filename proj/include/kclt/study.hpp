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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kclt/asymcov.hpp"
#include "kclt/geometry.hpp"
#include "kclt/random.hpp"
#include "kclt/simulate.hpp"

namespace kclt {

/// Point process used to generate study replicates.
struct ModelSpec {
    enum class Kind { poisson, matern };

    Kind kind = Kind::poisson;
    double rho = 200.0;            ///< Poisson intensity
    MaternParams matern{25.0, 8.0, 0.2};
    std::optional<std::size_t> replicates;  ///< overrides the study default

    static ModelSpec poisson(double rho);
    static ModelSpec matern_cluster(MaternParams params);

    std::string name() const;
    double intensity() const;
    PointPattern simulate(const Window& window, Seed seed) const;
};

struct StudyConfig {
    std::vector<ModelSpec> models;
    std::vector<double> sides{1.0, 2.0};
    std::vector<IntensityMode> modes{IntensityMode::estimated, IntensityMode::known};
    std::size_t replicates = 2000;
    double alpha = 0.05;
    double R = 0.05;
    std::size_t grid = 50;
    std::size_t M = 10000;
    Seed seed{};

    void validate() const;
};

struct StudyCell {
    std::string model;
    double side = 0.0;
    IntensityMode mode = IntensityMode::estimated;
    double rejection = 0.0;
    double standard_error = 0.0;  ///< sqrt(p (1 - p) / replicates)
    std::size_t replicates = 0;   ///< replicates that produced a test result
    std::size_t failures = 0;
    double wall_seconds = 0.0;    ///< time of the (model, side) block shared by its modes
};

struct StudyResult {
    std::vector<StudyCell> cells;

    const StudyCell* find(const std::string& model, double side, IntensityMode mode) const;
};

/// Monte Carlo rejection rates of the KS test. Replicate r of (model, side)
/// block c uses stream(seed, c * 1'000'000 + r) and is shared by all modes.
StudyResult rejection_study(const StudyConfig& config);

struct OracleEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

struct OracleComparison {
    OracleEstimate known;
    OracleEstimate estimated;
};

/// |W| times the sample covariance of (K_hat(r1), K_hat(r2)) across replicates,
/// with the true (known) and the estimated intensity on the same replicates.
OracleComparison empirical_cov_both(const ModelSpec& model, double side, double r1, double r2,
                                    std::size_t replicates, Seed seed);

OracleEstimate empirical_cov_oracle(const ModelSpec& model, double side, double r1, double r2,
                                    IntensityMode mode, std::size_t replicates, Seed seed);

}  // namespace kclt
