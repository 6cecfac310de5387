// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "cfgdist/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "cfgdist/error.hpp"
#include "cfgdist/joint_gaussian.hpp"
#include "cfgdist/mixture_rem.hpp"

namespace cfgdist
{
void Axis::validate() const
{
    detail::require(!name.empty(), "axis needs a name");
    detail::require(n_points >= 2, "axis " + name + " needs n_points >= 2");
    detail::require(std::isfinite(min) && std::isfinite(max) && min < max,
                    "axis " + name + " needs finite min < max");
    detail::require(scale == AxisScale::linear || min > 0,
                    "log axis " + name + " needs min > 0");
}

std::vector<double> Axis::values() const
{
    validate();
    std::vector<double> out(static_cast<std::size_t>(n_points));
    auto const n = static_cast<double>(n_points);
    for (int i = 0; i < n_points; ++i)
    {
        double const frac = open_min ? (i + 1) / n : i / (n - 1.0);
        out[static_cast<std::size_t>(i)] =
            scale == AxisScale::linear
                ? min + (max - min) * frac
                : std::exp(std::log(min) + (std::log(max) - std::log(min)) * frac);
    }
    out.back() = max;
    if (!open_min)
        out.front() = min;
    return out;
}

void GridSpec::validate() const
{
    axis1.validate();
    axis2.validate();
}

std::string_view to_string(Region r)
{
    switch (r)
    {
    case Region::separability_and_diversity:
        return "separability_and_diversity";
    case Region::mean_collapse:
        return "mean_collapse";
    case Region::variance_shrink:
        return "variance_shrink";
    case Region::no_distortion:
        return "no_distortion";
    }
    return "unknown";
}

Region classify(double delta_mu, double delta_sigma2)
{
    if (std::abs(delta_mu) < kNoDistortionTol && std::abs(delta_sigma2) < kNoDistortionTol)
        return Region::no_distortion;
    if (delta_sigma2 < -kSignTol)
        return Region::variance_shrink;
    if (delta_mu < -kSignTol)
        return Region::mean_collapse;
    return Region::separability_and_diversity;
}

namespace
{
using CellFn = std::function<SweepRow(double, double)>;

std::vector<SweepRow> evaluate(GridSpec const& grid, SweepOptions const& opt,
                               CellFn const& cell)
{
    grid.validate();
    auto const xs = grid.axis1.values();
    auto const ys = grid.axis2.values();
    std::vector<SweepRow> rows(xs.size() * ys.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < rows.size(); k = next.fetch_add(1))
        {
            double const x = xs[k / ys.size()];
            double const y = ys[k % ys.size()];
            try
            {
                rows[k] = cell(x, y);
            }
            catch (Error const& e)
            {
                rows[k] = SweepRow{};
                rows[k].error = e.what();
            }
            rows[k].x1 = x;
            rows[k].x2 = y;
        }
    };
    unsigned const hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t const n_workers = std::min<std::size_t>(
        opt.workers > 0 ? static_cast<std::size_t>(opt.workers) : hw, rows.size());
    if (n_workers <= 1)
    {
        worker();
        return rows;
    }
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < n_workers; ++i)
        threads.emplace_back(worker);
    for (auto& th : threads)
        th.join();
    return rows;
}

SweepRow constant_cell(double sigma2, double beta, double w)
{
    MixtureTheoryParams const params{sigma2, beta, GuidanceSchedule::constant(w), {}};
    auto const report = assemble_trajectory(params, {}).second;
    SweepRow row;
    row.t_speciation = report.t_speciation;
    row.mean_coeff = 1.0 + report.delta_mu;
    row.variance_coeff = sigma2 * (1.0 + report.delta_sigma2);
    row.delta_mu = report.delta_mu;
    row.delta_sigma2 = report.delta_sigma2;
    row.region = classify(report.delta_mu, report.delta_sigma2);
    return row;
}
}  // namespace

std::vector<SweepRow> sweep_beta_w(double sigma2, GridSpec const& grid,
                                   SweepOptions const& opt)
{
    detail::require(std::isfinite(sigma2) && sigma2 > 0, "sigma2 must be > 0");
    return evaluate(grid, opt, [sigma2](double beta, double w) {
        return constant_cell(sigma2, beta, w);
    });
}

std::vector<SweepRow> sweep_sigma_w(double beta, GridSpec const& grid,
                                    SweepOptions const& opt)
{
    detail::require(beta >= 0, "beta must be >= 0");
    return evaluate(grid, opt, [beta](double sigma2, double w) {
        return constant_cell(sigma2, beta, w);
    });
}

std::vector<SweepRow> sweep_sigma_beta(double w, GridSpec const& grid,
                                       SweepOptions const& opt)
{
    detail::require(std::isfinite(w) && w > -0.5, "constant guidance requires w > -1/2");
    return evaluate(grid, opt, [w](double sigma2, double beta) {
        return constant_cell(sigma2, beta, w);
    });
}

std::vector<SweepRow> sweep_schedule_phase_diagram(double sigma2, GridSpec const& grid,
                                                   SweepOptions const& opt)
{
    detail::require(std::isfinite(sigma2) && sigma2 > 0, "sigma2 must be > 0");
    return evaluate(grid, opt, [sigma2, &opt](double w0, double omega) {
        auto const m = guided_moments_linear_schedule(0.0, sigma2, {w0, omega},
                                                      opt.quadrature, opt.horizon);
        auto const [dmu, dsig] = distortion_from_moments(m, sigma2);
        SweepRow row;
        row.mean_coeff = m.mean_coeff;
        row.variance_coeff = m.variance;
        row.delta_mu = dmu;
        row.delta_sigma2 = dsig;
        row.region = classify(dmu, dsig);
        return row;
    });
}

std::vector<SweepRow> sweep_joint_gaussian_schedule(double r, double s,
                                                    GridSpec const& grid,
                                                    SweepOptions const& opt)
{
    detail::require(std::isfinite(r) && std::isfinite(s) && 0 < s && s < r,
                    "joint schedule sweep needs 0 < s < r");
    return evaluate(grid, opt, [r, s, &opt](double w0, double omega) {
        double const lam = mean_coeff_linear(s, r, {w0, omega}, 0.0, opt.quadrature);
        double const big_lam = cov_coeff_linear(s, r, {w0, omega}, 0.0, opt.quadrature);
        SweepRow row;
        row.mean_coeff = lam;
        row.variance_coeff = big_lam;
        row.delta_mu = lam - 1.0;
        row.delta_sigma2 = big_lam - 1.0;
        row.region = classify(lam - 1.0, big_lam - 1.0);
        return row;
    });
}
}  // namespace cfgdist
