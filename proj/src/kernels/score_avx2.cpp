// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <immintrin.h>

#include "tiled_softmax.hpp"

namespace cfgdist::kernels
{
namespace
{
using namespace detail_tiled;

struct Avx2
{
    using reg = __m256d;
    static constexpr std::size_t kLanes = 4;

    static reg zero() { return _mm256_setzero_pd(); }
    static reg set1(double v) { return _mm256_set1_pd(v); }
    static reg load(double const* p) { return _mm256_load_pd(p); }
    static reg loadu(double const* p) { return _mm256_loadu_pd(p); }
    static void store(double* p, reg v) { _mm256_store_pd(p, v); }
    static void storeu(double* p, reg v) { _mm256_storeu_pd(p, v); }
    static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_pd(a, b, c); }
    static reg add(reg a, reg b) { return _mm256_add_pd(a, b); }
    static reg sub(reg a, reg b) { return _mm256_sub_pd(a, b); }
    static reg mul(reg a, reg b) { return _mm256_mul_pd(a, b); }
    static reg max(reg a, reg b) { return _mm256_max_pd(a, b); }

    static reg exp(reg x)
    {
        reg const lo = set1(-708.0);
        reg const keep = _mm256_cmp_pd(x, lo, _CMP_GE_OQ);
        x = _mm256_min_pd(_mm256_max_pd(x, lo), set1(709.0));
        reg const n = _mm256_round_pd(_mm256_mul_pd(x, set1(kLog2e)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        reg r = _mm256_fnmadd_pd(n, set1(kLn2Hi), x);
        r = _mm256_fnmadd_pd(n, set1(kLn2Lo), r);
        reg p = set1(kExpTaylor[0]);
        for (std::size_t i = 1; i < kExpTaylor.size(); ++i)
            p = fmadd(p, r, set1(kExpTaylor[i]));
        __m256i const biased = _mm256_add_epi64(
            _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n)), _mm256_set1_epi64x(1023));
        reg const scale = _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));
        return _mm256_and_pd(mul(p, scale), keep);
    }

    static double hsum(reg v)
    {
        __m128d const s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
        return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
    }

    static double hmax(reg v)
    {
        __m128d const m = _mm_max_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
        return std::max(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
    }
};
}  // namespace

void weighted_mean_avx2(CentroidPanel const& panel, std::span<const double> xs,
                        double u, std::span<double> out)
{
    weighted_mean_tiled<Avx2>(panel, xs, u, out);
}
}  // namespace cfgdist::kernels
