// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
// Times the weighted-mean kernels: bench_kernels [dim] [count] [queries]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "cfgdist/rng.hpp"
#include "cfgdist/simulator.hpp"

int main(int argc, char** argv)
{
    int const dim = argc > 1 ? std::atoi(argv[1]) : 20;
    std::size_t const count = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 22026;
    std::size_t const queries = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 256;
    auto const inst = cfgdist::sample_centroids(dim, count, 1, 0.5);
    cfgdist::CounterRng const rng(2, 0);
    std::vector<double> xs(queries * static_cast<std::size_t>(dim));
    std::vector<double> out(xs.size());
    for (double u : {100.0, 1.0, 0.5})
    {
        for (std::size_t q = 0; q < queries; ++q)
        {
            std::span<double> row(xs.data() + q * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
            rng.normals(q, 0, row);
            for (double& x : row)
                x *= std::sqrt(u);
        }
        std::vector<double> ref(out.size());
        cfgdist::kernels::weighted_mean_scalar(inst.panel, xs, u, ref);
        for (auto isa : cfgdist::kernels::available_isas())
        {
            auto fn = cfgdist::kernels::select(isa);
            auto const t0 = std::chrono::steady_clock::now();
            fn(inst.panel, xs, u, out);
            double const us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
            double worst = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i)
                worst = std::max(worst, std::abs(out[i] - ref[i]) / (1.0 + std::abs(ref[i])));
            std::printf("u=%-6g %-7s %8.2f us/query  max rel diff %.3g\n", u,
                        std::string(cfgdist::kernels::to_string(isa)).c_str(),
                        us / static_cast<double>(queries), worst);
        }
    }
}
