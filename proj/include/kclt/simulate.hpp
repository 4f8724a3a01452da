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

#include "kclt/geometry.hpp"
#include "kclt/intensity.hpp"
#include "kclt/random.hpp"

namespace kclt {

struct MaternParams {
    double kappa;  ///< parent intensity
    double mu;     ///< mean offspring per parent
    double rdisp;  ///< dispersal radius

    void validate() const;
};

/// Homogeneous Poisson process of intensity `rho` on `window`.
PointPattern simulate_poisson(double rho, const Window& window, Seed seed);

/// Inhomogeneous Poisson process by independent thinning of a dominating
/// homogeneous process of intensity `rho_max`.
PointPattern simulate_poisson_inhom(const IntensityModel& model, double rho_max,
                                    const Window& window, Seed seed);

/// Matern cluster process. Parents live on the window dilated by `rdisp`, so
/// every parent that can place offspring inside the window is simulated.
PointPattern simulate_matern(const MaternParams& params, const Window& window, Seed seed);

}  // namespace kclt
