// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>

#include "cfgdist/error.hpp"
#include "cfgdist/score_kernels.hpp"

namespace cfgdist::kernels
{
CentroidPanel::CentroidPanel(std::span<const double> rows, std::size_t count,
                             int dim)
    : dim_(dim), count_(count)
{
    detail::require(dim >= 1 && count >= 1, "centroid panel needs dim, count >= 1");
    detail::require(rows.size() == count * static_cast<std::size_t>(dim),
                    "centroid panel shape mismatch");
    stride_ = (count + kAlign - 1) / kAlign * kAlign;
    coords_.assign(stride_ * static_cast<std::size_t>(dim), 0.0);
    half_sqnorm_.assign(stride_, std::numeric_limits<double>::infinity());
    for (std::size_t mu = 0; mu < count; ++mu)
    {
        double sq = 0.0;
        for (int j = 0; j < dim; ++j)
        {
            double const c = rows[mu * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)];
            coords_[static_cast<std::size_t>(j) * stride_ + mu] = c;
            sq += c * c;
        }
        half_sqnorm_[mu] = 0.5 * sq;
    }
}

void weighted_mean_scalar(CentroidPanel const& panel, std::span<const double> xs,
                          double u, std::span<double> out)
{
    auto const d = static_cast<std::size_t>(panel.dim());
    std::size_t const m = panel.count();
    detail::require(xs.size() % d == 0 && out.size() == xs.size(),
                    "weighted mean batch shape mismatch");
    std::vector<double> logits(m);
    for (std::size_t b = 0; b < xs.size() / d; ++b)
    {
        double const* x = xs.data() + b * d;
        double* y = out.data() + b * d;
        for (std::size_t mu = 0; mu < m; ++mu)
        {
            double sq = 0.0;
            for (std::size_t j = 0; j < d; ++j)
            {
                double const diff = x[j] - panel.at(mu, static_cast<int>(j));
                sq += diff * diff;
            }
            logits[mu] = -sq / (2.0 * u);
        }
        double const top = *std::max_element(logits.begin(), logits.end());
        double total = 0.0;
        std::fill(y, y + d, 0.0);
        for (std::size_t mu = 0; mu < m; ++mu)
        {
            double const e = std::exp(logits[mu] - top);
            total += e;
            for (std::size_t j = 0; j < d; ++j)
                y[j] += e * panel.at(mu, static_cast<int>(j));
        }
        for (std::size_t j = 0; j < d; ++j)
            y[j] /= total;
    }
}
}  // namespace cfgdist::kernels
