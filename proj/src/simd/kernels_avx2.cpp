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

// Compiled with -mavx2 only; reached through the dispatcher after a CPUID check.

#include "kclt/simd/kernels.hpp"

#include <immintrin.h>

namespace kclt::simd::detail {

namespace {

inline __m256d abs_pd(__m256d v)
{
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

}  // namespace

std::size_t radius_filter_avx2(const double* const* axes, std::size_t dim, std::size_t count,
                               const double* query, double r2, std::uint32_t* out_index,
                               double* out_d2)
{
    const __m256d zero = _mm256_setzero_pd();
    const __m256d limit = _mm256_set1_pd(r2);
    std::size_t found = 0;
    std::size_t j = 0;
    alignas(32) double lanes[4];
    for (; j + 4 <= count; j += 4) {
        __m256d acc = zero;
        for (std::size_t k = 0; k < dim; ++k) {
            const __m256d diff =
                _mm256_sub_pd(_mm256_loadu_pd(axes[k] + j), _mm256_set1_pd(query[k]));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
        }
        const __m256d keep = _mm256_and_pd(_mm256_cmp_pd(acc, zero, _CMP_GT_OQ),
                                           _mm256_cmp_pd(acc, limit, _CMP_LE_OQ));
        int mask = _mm256_movemask_pd(keep);
        if (mask == 0) {
            continue;
        }
        _mm256_store_pd(lanes, acc);
        while (mask != 0) {
            const int lane = __builtin_ctz(static_cast<unsigned>(mask));
            out_index[found] = static_cast<std::uint32_t>(j + lane);
            out_d2[found] = lanes[lane];
            ++found;
            mask &= mask - 1;
        }
    }
    for (; j < count; ++j) {
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

void sup_abs_lower_avx2(const double* lower, std::size_t m, const double* normals,
                        std::size_t batch, double* sup_out)
{
    std::size_t b = 0;
    // Four independent vectors per pass to hide add latency.
    for (; b + 16 <= batch; b += 16) {
        __m256d sup0 = _mm256_setzero_pd();
        __m256d sup1 = sup0, sup2 = sup0, sup3 = sup0;
        for (std::size_t j = 0; j < m; ++j) {
            const double* row = lower + j * m;
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = acc0, acc2 = acc0, acc3 = acc0;
            for (std::size_t k = 0; k <= j; ++k) {
                const __m256d coef = _mm256_set1_pd(row[k]);
                const double* z = normals + k * batch + b;
                acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(coef, _mm256_loadu_pd(z)));
                acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(coef, _mm256_loadu_pd(z + 4)));
                acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(coef, _mm256_loadu_pd(z + 8)));
                acc3 = _mm256_add_pd(acc3, _mm256_mul_pd(coef, _mm256_loadu_pd(z + 12)));
            }
            sup0 = _mm256_max_pd(sup0, abs_pd(acc0));
            sup1 = _mm256_max_pd(sup1, abs_pd(acc1));
            sup2 = _mm256_max_pd(sup2, abs_pd(acc2));
            sup3 = _mm256_max_pd(sup3, abs_pd(acc3));
        }
        _mm256_storeu_pd(sup_out + b, sup0);
        _mm256_storeu_pd(sup_out + b + 4, sup1);
        _mm256_storeu_pd(sup_out + b + 8, sup2);
        _mm256_storeu_pd(sup_out + b + 12, sup3);
    }
    for (; b + 4 <= batch; b += 4) {
        __m256d sup = _mm256_setzero_pd();
        for (std::size_t j = 0; j < m; ++j) {
            const double* row = lower + j * m;
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t k = 0; k <= j; ++k) {
                acc = _mm256_add_pd(
                    acc, _mm256_mul_pd(_mm256_set1_pd(row[k]),
                                       _mm256_loadu_pd(normals + k * batch + b)));
            }
            sup = _mm256_max_pd(sup, abs_pd(acc));
        }
        _mm256_storeu_pd(sup_out + b, sup);
    }
}

}  // namespace kclt::simd::detail
