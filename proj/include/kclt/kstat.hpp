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
#include <span>
#include <vector>

#include "kclt/geometry.hpp"
#include "kclt/intensity.hpp"

namespace kclt {

/// Evenly spaced radii rmin = r_0 < ... < r_{m-1} = rmax, all positive.
class RadiusGrid {
public:
    RadiusGrid(double rmin, double rmax, std::size_t count);

    /// The default grid: `count` points R/count, 2R/count, ..., R.
    static RadiusGrid uniform(double rmax, std::size_t count);

    double rmin() const { return values_.front(); }
    double rmax() const { return values_.back(); }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const RadiusGrid&, const RadiusGrid&) = default;

private:
    std::vector<double> values_;
};

/// Values on a radius grid; `width` columns per radius (1 for K, p for H).
struct Curve {
    RadiusGrid grid;
    std::size_t width = 1;
    std::vector<double> values;  // row-major, size() * width

    double at(std::size_t i, std::size_t column = 0) const { return values[i * width + column]; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * width, width}; }
};

struct KCurves {
    Curve k;
    Curve h;
};

/// Translation-corrected K estimate with intensity `model` plugged in.
Curve k_hat(const PointPattern& pattern, const IntensityModel& model, const RadiusGrid& grid);

/// Gradient of the K estimate in the intensity parameters.
Curve h_matrix(const PointPattern& pattern, const IntensityModel& model, const RadiusGrid& grid);

/// Both curves from one pair list; `pairs` must cover grid.rmax().
KCurves k_and_h(const PointPattern& pattern, const PairList& pairs, const IntensityModel& model,
                const RadiusGrid& grid);

/// K estimate only, from a precomputed pair list.
Curve k_hat(const PointPattern& pattern, const PairList& pairs, const IntensityModel& model,
            const RadiusGrid& grid);

/// Volume of the d-ball of radius r, the K-function of a Poisson process.
double k_poisson(double r, std::size_t dim);

/// First-order Taylor remainder K(beta_hat) - K(beta*) - H(beta*)(beta_hat - beta*),
/// where `model_star` is the model at beta*.
Curve taylor_residual(const PointPattern& pattern, const IntensityModel& model_star,
                      std::span<const double> beta_hat, const RadiusGrid& grid);

}  // namespace kclt
