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

#include "kclt/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace kclt::simd::detail {

std::size_t radius_filter_scalar(const double* const* axes, std::size_t dim, std::size_t count,
                                 const double* query, double r2, std::uint32_t* out_index,
                                 double* out_d2)
{
    std::size_t found = 0;
    for (std::size_t j = 0; j < count; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double diff = axes[k][j] - query[k];
            acc = acc + diff * diff;
        }
        if (acc > 0.0 && acc <= r2) {
            out_index[found] = static_cast<std::uint32_t>(j);
            out_d2[found] = acc;
            ++found;
        }
    }
    return found;
}

void sup_abs_lower_scalar(const double* lower, std::size_t m, const double* normals,
                          std::size_t batch, double* sup_out)
{
    for (std::size_t b = 0; b < batch; ++b) {
        double sup = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double* row = lower + j * m;
            double acc = 0.0;
            for (std::size_t k = 0; k <= j; ++k) {
                acc = acc + row[k] * normals[k * batch + b];
            }
            sup = std::max(sup, std::fabs(acc));
        }
        sup_out[b] = sup;
    }
}

}  // namespace kclt::simd::detail
