// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cfgdist/rng.hpp"
#include "cfgdist/score_kernels.hpp"
#include "cfgdist/simulator.hpp"

using namespace cfgdist;

namespace
{
std::vector<double> queries(int dim, std::size_t n, double scale, std::uint64_t seed)
{
    std::vector<double> xs(n * static_cast<std::size_t>(dim));
    CounterRng const rng(seed, stream_id("kernel-test"));
    rng.normals(0, 0, xs);
    for (double& x : xs)
        x *= scale;
    return xs;
}

double max_rel_diff(std::vector<double> const& a, std::vector<double> const& b)
{
    double scale = 0.0;
    for (double v : a)
        scale = std::max(scale, std::abs(v));
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        diff = std::max(diff, std::abs(a[i] - b[i]));
    return diff / std::max(scale, 1e-300);
}
}  // namespace

TEST_SUITE("kernels")
{
    TEST_CASE("panel layout")
    {
        std::vector<double> rows{1, 2, 3, 4, 5, 6};
        kernels::CentroidPanel const panel(rows, 3, 2);
        CHECK(panel.stride() % kernels::CentroidPanel::kAlign == 0);
        CHECK(panel.at(0, 0) == 1);
        CHECK(panel.at(2, 1) == 6);
        CHECK(panel.half_sqnorm()[1] == doctest::Approx(12.5));
        CHECK(std::isinf(panel.half_sqnorm()[3]));
    }

    TEST_CASE("scalar kernel against a direct softmax")
    {
        auto const inst = sample_centroids(3, 5, 4, 0.5, false);
        auto const xs = queries(3, 7, 1.5, 1);
        std::vector<double> out(xs.size());
        double const u = 0.8;
        kernels::weighted_mean_scalar(inst.panel, xs, u, out);
        for (std::size_t q = 0; q < 7; ++q)
        {
            std::vector<double> logit(5);
            for (std::size_t m = 0; m < 5; ++m)
            {
                double d2 = 0;
                for (int j = 0; j < 3; ++j)
                    d2 += std::pow(xs[q * 3 + j] - inst.centroids[m * 3 + j], 2);
                logit[m] = -d2 / (2 * u);
            }
            double const top = *std::max_element(logit.begin(), logit.end());
            double z = 0;
            for (double& l : logit)
                z += (l = std::exp(l - top));
            for (int j = 0; j < 3; ++j)
            {
                double m = 0;
                for (std::size_t c = 0; c < 5; ++c)
                    m += logit[c] / z * inst.centroids[c * 3 + j];
                CHECK(out[q * 3 + j] == doctest::Approx(m).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("vector kernels agree with the scalar reference")
    {
        auto const isas = kernels::available_isas();
        REQUIRE(!isas.empty());
        CHECK(isas.front() == kernels::Isa::scalar);
        struct Shape
        {
            int dim;
            std::size_t count;
            std::size_t n;
        };
        for (Shape sh : {Shape{1, 1, 3}, Shape{3, 4, 5}, Shape{7, 63, 9}, Shape{10, 148, 17}, Shape{20, 2000, 11},
                         Shape{5, 1000, 70}})
            for (double u : {50.0, 1.0, 0.5, 0.01})
            {
                auto const inst = sample_centroids(sh.dim, sh.count, 9, 0.5);
                auto const xs = queries(sh.dim, sh.n, std::sqrt(1.0 + u), sh.count);
                std::vector<double> ref(xs.size());
                kernels::weighted_mean_scalar(inst.panel, xs, u, ref);
                for (auto isa : isas)
                {
                    CAPTURE(kernels::to_string(isa));
                    CAPTURE(sh.dim);
                    CAPTURE(sh.count);
                    CAPTURE(u);
                    std::vector<double> got(xs.size());
                    kernels::select(isa)(inst.panel, xs, u, got);
                    CHECK(max_rel_diff(ref, got) < 1e-12);
                }
            }
    }

    TEST_CASE("far queries do not underflow")
    {
        auto const inst = sample_centroids(4, 300, 2, 0.5);
        std::vector<double> xs(4, 40.0);
        std::vector<double> ref(4);
        kernels::weighted_mean_scalar(inst.panel, xs, 0.5, ref);
        for (auto isa : kernels::available_isas())
        {
            std::vector<double> got(4);
            kernels::select(isa)(inst.panel, xs, 0.5, got);
            for (int j = 0; j < 4; ++j)
            {
                CHECK(std::isfinite(got[j]));
                CHECK(got[j] == doctest::Approx(ref[j]).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("isa names")
    {
        CHECK(kernels::to_string(kernels::Isa::scalar) == "scalar");
        CHECK(kernels::to_string(kernels::Isa::avx2) == "avx2");
        CHECK(kernels::to_string(kernels::Isa::avx512) == "avx512");
    }
}
