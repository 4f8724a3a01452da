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

#include "kclt/simulate.hpp"

#include <cmath>

#include "kclt/error.hpp"

namespace kclt {

void MaternParams::validate() const
{
    if (!(kappa > 0.0) || !(mu > 0.0) || !(rdisp > 0.0) || !std::isfinite(kappa) ||
        !std::isfinite(mu) || !std::isfinite(rdisp)) {
        throw DomainError("Matern parameters must be positive and finite");
    }
}

PointPattern simulate_poisson(double rho, const Window& window, Seed seed)
{
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw DomainError("intensity must be positive and finite");
    }
    Rng rng(seed);
    const std::uint64_t count = rng.poisson(rho * window.volume());
    std::vector<double> coords(count * window.dim());
    const double h = window.half();
    for (double& x : coords) {
        x = rng.uniform(-h, h);
    }
    return PointPattern(window, std::move(coords));
}

PointPattern simulate_poisson_inhom(const IntensityModel& model, double rho_max,
                                    const Window& window, Seed seed)
{
    if (!(rho_max > 0.0) || !std::isfinite(rho_max)) {
        throw DomainError("dominating intensity must be positive and finite");
    }
    Rng rng(seed);
    const std::size_t d = window.dim();
    const std::uint64_t count = rng.poisson(rho_max * window.volume());
    const double h = window.half();
    std::vector<double> coords;
    std::vector<double> u(d);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (double& x : u) {
            x = rng.uniform(-h, h);
        }
        const double rho = model.value(u);
        if (rho > rho_max) {
            throw DomainError("dominating bound violated");
        }
        if (rng.uniform() < rho / rho_max) {
            coords.insert(coords.end(), u.begin(), u.end());
        }
    }
    return PointPattern(window, std::move(coords));
}

PointPattern simulate_matern(const MaternParams& params, const Window& window, Seed seed)
{
    params.validate();
    Rng rng(seed);
    const std::size_t d = window.dim();
    const Window dilated(d, window.side() + 2.0 * params.rdisp);
    const std::uint64_t parents = rng.poisson(params.kappa * dilated.volume());
    const double h = dilated.half();
    const double r = params.rdisp;
    const double r2 = r * r;

    std::vector<double> coords;
    std::vector<double> parent(d);
    std::vector<double> child(d);
    for (std::uint64_t k = 0; k < parents; ++k) {
        for (double& x : parent) {
            x = rng.uniform(-h, h);
        }
        const std::uint64_t offspring = rng.poisson(params.mu);
        for (std::uint64_t c = 0; c < offspring; ++c) {
            double norm2;
            do {
                norm2 = 0.0;
                for (std::size_t a = 0; a < d; ++a) {
                    child[a] = rng.uniform(-r, r);
                    norm2 += child[a] * child[a];
                }
            } while (norm2 > r2);
            for (std::size_t a = 0; a < d; ++a) {
                child[a] += parent[a];
            }
            if (window.contains(child)) {
                coords.insert(coords.end(), child.begin(), child.end());
            }
        }
    }
    return PointPattern(window, std::move(coords));
}

}  // namespace kclt
