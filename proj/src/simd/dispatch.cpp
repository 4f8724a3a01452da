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

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace kclt::simd {

namespace {

constexpr KernelTable scalar_table{Isa::scalar, &detail::radius_filter_scalar,
                                   &detail::sup_abs_lower_scalar};
#if defined(KCLT_HAVE_AVX2)
constexpr KernelTable avx2_table{Isa::avx2, &detail::radius_filter_avx2,
                                 &detail::sup_abs_lower_avx2};
#endif

const KernelTable& select_best()
{
    const char* forced = std::getenv("KCLT_FORCE_SCALAR");
    if (forced != nullptr && *forced != '\0' && std::string(forced) != "0") {
        return scalar_table;
    }
#if defined(KCLT_HAVE_AVX2)
    if (isa_supported(Isa::avx2)) {
        return avx2_table;
    }
#endif
    return scalar_table;
}

}  // namespace

std::string_view isa_name(Isa isa)
{
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa)
{
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(KCLT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    }
    return false;
}

const KernelTable& kernels(Isa isa)
{
    if (!isa_supported(isa)) {
        throw std::invalid_argument("instruction set not supported: " +
                                    std::string(isa_name(isa)));
    }
#if defined(KCLT_HAVE_AVX2)
    if (isa == Isa::avx2) {
        return avx2_table;
    }
#endif
    return scalar_table;
}

const KernelTable& kernels()
{
    static const KernelTable& best = select_best();
    return best;
}

}  // namespace kclt::simd
