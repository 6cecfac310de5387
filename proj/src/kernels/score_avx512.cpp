// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <immintrin.h>

#include "tiled_softmax.hpp"

namespace cfgdist::kernels
{
namespace
{
using namespace detail_tiled;

struct Avx512
{
    using reg = __m512d;
    static constexpr std::size_t kLanes = 8;

    static reg zero() { return _mm512_setzero_pd(); }
    static reg set1(double v) { return _mm512_set1_pd(v); }
    static reg load(double const* p) { return _mm512_load_pd(p); }
    static reg loadu(double const* p) { return _mm512_loadu_pd(p); }
    static void store(double* p, reg v) { _mm512_store_pd(p, v); }
    static void storeu(double* p, reg v) { _mm512_storeu_pd(p, v); }
    static reg fmadd(reg a, reg b, reg c) { return _mm512_fmadd_pd(a, b, c); }
    static reg add(reg a, reg b) { return _mm512_add_pd(a, b); }
    static reg sub(reg a, reg b) { return _mm512_sub_pd(a, b); }
    static reg mul(reg a, reg b) { return _mm512_mul_pd(a, b); }
    static reg max(reg a, reg b) { return _mm512_max_pd(a, b); }

    static reg exp(reg x)
    {
        reg const lo = set1(-708.0);
        __mmask8 const keep = _mm512_cmp_pd_mask(x, lo, _CMP_GE_OQ);
        x = _mm512_min_pd(_mm512_max_pd(x, lo), set1(709.0));
        reg const n = _mm512_roundscale_pd(_mm512_mul_pd(x, set1(kLog2e)),
                                           _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        reg r = _mm512_fnmadd_pd(n, set1(kLn2Hi), x);
        r = _mm512_fnmadd_pd(n, set1(kLn2Lo), r);
        reg p = set1(kExpTaylor[0]);
        for (std::size_t i = 1; i < kExpTaylor.size(); ++i)
            p = fmadd(p, r, set1(kExpTaylor[i]));
        return _mm512_maskz_scalef_pd(keep, p, n);
    }

    static double hsum(reg v) { return _mm512_reduce_add_pd(v); }
    static double hmax(reg v) { return _mm512_reduce_max_pd(v); }
};
}  // namespace

void weighted_mean_avx512(CentroidPanel const& panel, std::span<const double> xs,
                          double u, std::span<double> out)
{
    weighted_mean_tiled<Avx512>(panel, xs, u, out);
}
}  // namespace cfgdist::kernels
