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
#include <cstdint>
#include <string_view>

// Data-parallel inner loops with a portable scalar reference and SIMD variants
// chosen at runtime. Every variant performs the same floating-point operations
// in the same order per lane (no FMA contraction), so results are bit-identical
// across variants and the choice never changes program output.

namespace kclt::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Candidate filter for fixed-radius search.
///
/// `axes[k]` points at the k-th coordinate of `count` candidates (structure of
/// arrays). Writes the offsets of candidates with 0 < |c - query|^2 <= r2 to
/// `out_index` and their squared distances to `out_d2`; returns how many.
/// Squared distances accumulate over axes in order: ((d0*d0 + d1*d1) + d2*d2)...
using RadiusFilterFn = std::size_t (*)(const double* const* axes, std::size_t dim,
                                       std::size_t count, const double* query, double r2,
                                       std::uint32_t* out_index, double* out_d2);

/// Sup-norm of correlated Gaussian draws.
///
/// `lower` is an m x m row-major lower-triangular factor. `normals` holds a
/// block of standard normals laid out as normals[k * batch + b]. For every
/// draw b writes max_j |sum_{k<=j} lower[j*m+k] * normals[k*batch+b]| to
/// `sup_out[b]`; the inner sum runs over k in increasing order. `batch` must be
/// a multiple of 4.
using SupAbsLowerFn = void (*)(const double* lower, std::size_t m, const double* normals,
                               std::size_t batch, double* sup_out);

struct KernelTable {
    Isa isa;
    RadiusFilterFn radius_filter;
    SupAbsLowerFn sup_abs_lower;
};

bool isa_supported(Isa isa);

/// Kernels for a specific ISA; throws std::invalid_argument when unsupported.
const KernelTable& kernels(Isa isa);

/// Best supported kernels, honouring the KCLT_FORCE_SCALAR environment variable.
const KernelTable& kernels();

namespace detail {
std::size_t radius_filter_scalar(const double* const* axes, std::size_t dim, std::size_t count,
                                 const double* query, double r2, std::uint32_t* out_index,
                                 double* out_d2);
void sup_abs_lower_scalar(const double* lower, std::size_t m, const double* normals,
                          std::size_t batch, double* sup_out);
#if defined(KCLT_HAVE_AVX2)
std::size_t radius_filter_avx2(const double* const* axes, std::size_t dim, std::size_t count,
                               const double* query, double r2, std::uint32_t* out_index,
                               double* out_d2);
void sup_abs_lower_avx2(const double* lower, std::size_t m, const double* normals,
                        std::size_t batch, double* sup_out);
#endif
}  // namespace detail

}  // namespace kclt::simd
