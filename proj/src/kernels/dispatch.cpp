// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string>

#include "cfgdist/error.hpp"
#include "cfgdist/score_kernels.hpp"

namespace cfgdist::kernels
{
std::string_view to_string(Isa isa)
{
    switch (isa)
    {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    case Isa::avx512:
        return "avx512";
    }
    return "unknown";
}

std::vector<Isa> available_isas()
{
    std::vector<Isa> out{Isa::scalar};
#if defined(CFGDIST_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        out.push_back(Isa::avx2);
#endif
#if defined(CFGDIST_HAVE_AVX512)
    if (__builtin_cpu_supports("avx512f"))
        out.push_back(Isa::avx512);
#endif
    return out;
}

Isa default_isa()
{
    auto const isas = available_isas();
    if (char const* env = std::getenv("CFGDIST_ISA"))
    {
        for (Isa isa : isas)
            if (to_string(isa) == env)
                return isa;
        throw DomainError("CFGDIST_ISA=" + std::string(env) + " is not available");
    }
    return isas.back();
}

WeightedMeanFn select(Isa isa)
{
    switch (isa)
    {
    case Isa::scalar:
        return &weighted_mean_scalar;
    case Isa::avx2:
#if defined(CFGDIST_HAVE_AVX2)
        return &weighted_mean_avx2;
#else
        break;
#endif
    case Isa::avx512:
#if defined(CFGDIST_HAVE_AVX512)
        return &weighted_mean_avx512;
#else
        break;
#endif
    }
    throw DomainError("kernel ISA not compiled in: " + std::string(to_string(isa)));
}
}  // namespace cfgdist::kernels
