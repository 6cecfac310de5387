// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! Tiled online-softmax weighted mean, generic over a SIMD traits type V:
//!   V::kLanes, V::reg, zero, set1, load (aligned), loadu, store, storeu,
//!   fmadd, add, sub, mul, max, exp (0 below -708), hsum, hmax.
//! Included only by translation units compiled for the matching ISA.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "cfgdist/error.hpp"
#include "cfgdist/score_kernels.hpp"

namespace cfgdist::kernels::detail_tiled
{
inline constexpr std::size_t kMaxTile = 256;
inline constexpr std::size_t kBatch = 64;
inline constexpr std::size_t kTileBytes = 16384;

// Taylor coefficients of exp, highest order first.
inline constexpr std::array<double, 14> kExpTaylor = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
    1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
    1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
    1.0,                1.0};
inline constexpr double kLog2e = 1.4426950408889634;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;

template <class V>
void weighted_mean_tiled(CentroidPanel const& panel, std::span<const double> xs,
                         double u, std::span<double> out)
{
    using reg = typename V::reg;
    constexpr std::size_t L = V::kLanes;
    constexpr std::size_t kChunk = 8 * L;  // eight accumulators per dot block
    static_assert(CentroidPanel::kAlign % kChunk == 0);

    auto const d = static_cast<std::size_t>(panel.dim());
    detail::require(xs.size() % d == 0 && out.size() == xs.size(),
                    "weighted mean batch shape mismatch");
    std::size_t const stride = panel.stride();
    std::size_t const tile =
        std::clamp(kTileBytes / (sizeof(double) * d) / kChunk * kChunk, kChunk, kMaxTile);
    double const* coords = panel.coords();
    double const* hsq = panel.half_sqnorm();
    reg const inv_u = V::set1(1.0 / u);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    // L partial sums per (query, coordinate).
    std::vector<double> acc(kBatch * d * L);
    alignas(64) std::array<double, kMaxTile> w{};

    std::size_t const n_queries = xs.size() / d;
    for (std::size_t first = 0; first < n_queries; first += kBatch)
    {
        std::size_t const batch = std::min(kBatch, n_queries - first);
        std::array<double, kBatch> run_max;
        run_max.fill(kNegInf);
        reg sum[kBatch];
        for (auto& v : sum)
            v = V::zero();
        std::fill(acc.begin(), acc.end(), 0.0);

        for (std::size_t base = 0; base < stride; base += tile)
        {
            std::size_t const width = std::min(tile, stride - base);
            for (std::size_t b = 0; b < batch; ++b)
            {
                double const* x = xs.data() + (first + b) * d;
                reg vmax = V::set1(kNegInf);
                for (std::size_t c0 = 0; c0 < width; c0 += kChunk)
                {
                    reg dot[8];
                    for (auto& v : dot)
                        v = V::zero();
                    double const* col = coords + base + c0;
                    for (std::size_t j = 0; j < d; ++j)
                    {
                        reg const xj = V::set1(x[j]);
                        double const* row = col + j * stride;
                        for (std::size_t k = 0; k < 8; ++k)
                            dot[k] = V::fmadd(xj, V::loadu(row + L * k), dot[k]);
                    }
                    for (std::size_t k = 0; k < 8; ++k)
                    {
                        reg const h = V::loadu(hsq + base + c0 + L * k);
                        reg const l = V::mul(V::sub(dot[k], h), inv_u);
                        V::store(w.data() + c0 + L * k, l);
                        vmax = V::max(vmax, l);
                    }
                }
                double const tile_max = V::hmax(vmax);
                if (tile_max < run_max[b] - kPruneGap)
                    continue;
                double* a = acc.data() + b * d * L;
                if (tile_max > run_max[b])
                {
                    reg const rescale = V::set1(std::exp(run_max[b] - tile_max));
                    sum[b] = V::mul(sum[b], rescale);
                    for (std::size_t j = 0; j < d; ++j)
                        V::storeu(a + L * j, V::mul(V::loadu(a + L * j), rescale));
                    run_max[b] = tile_max;
                }
                reg const shift = V::set1(run_max[b]);
                for (std::size_t k = 0; k < width; k += L)
                {
                    reg const e = V::exp(V::sub(V::load(w.data() + k), shift));
                    V::store(w.data() + k, e);
                    sum[b] = V::add(sum[b], e);
                }
                std::size_t j = 0;
                // Four coordinates at a time share each weight load.
                for (; j + 4 <= d; j += 4)
                {
                    double const* row = coords + j * stride + base;
                    reg p[8];
                    for (auto& v : p)
                        v = V::zero();
                    for (std::size_t k = 0; k < width; k += 2 * L)
                    {
                        reg const e0 = V::load(w.data() + k);
                        reg const e1 = V::load(w.data() + k + L);
                        for (std::size_t q = 0; q < 4; ++q)
                        {
                            double const* rq = row + q * stride + k;
                            p[2 * q] = V::fmadd(e0, V::loadu(rq), p[2 * q]);
                            p[2 * q + 1] = V::fmadd(e1, V::loadu(rq + L), p[2 * q + 1]);
                        }
                    }
                    for (std::size_t q = 0; q < 4; ++q)
                    {
                        double* aq = a + L * (j + q);
                        V::storeu(aq, V::add(V::loadu(aq), V::add(p[2 * q], p[2 * q + 1])));
                    }
                }
                for (; j < d; ++j)
                {
                    double const* row = coords + j * stride + base;
                    reg p0 = V::zero();
                    reg p1 = V::zero();
                    for (std::size_t k = 0; k < width; k += 2 * L)
                    {
                        p0 = V::fmadd(V::load(w.data() + k), V::loadu(row + k), p0);
                        p1 = V::fmadd(V::load(w.data() + k + L), V::loadu(row + k + L), p1);
                    }
                    V::storeu(a + L * j, V::add(V::loadu(a + L * j), V::add(p0, p1)));
                }
            }
        }

        for (std::size_t b = 0; b < batch; ++b)
        {
            double const total = V::hsum(sum[b]);
            double* y = out.data() + (first + b) * d;
            for (std::size_t j = 0; j < d; ++j)
                y[j] = V::hsum(V::loadu(acc.data() + (b * d + j) * L)) / total;
        }
    }
}
}  // namespace cfgdist::kernels::detail_tiled
