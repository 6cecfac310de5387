// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "cfgdist/error.hpp"
#include "cfgdist/rng.hpp"

namespace cfgdist::app
{
double beta_polynomial_oracle(double a, int b, double f1, double f2)
{
    detail::require(b >= 1, "polynomial oracle needs integer b >= 1");
    double out = 0.0;
    double binom = 1.0;
    for (int k = 0; k < b; ++k)
    {
        double const e = a + k;
        double const sign = k % 2 == 0 ? 1.0 : -1.0;
        double const term = e == 0.0 ? std::log(f2 / f1) : (std::pow(f2, e) - std::pow(f1, e)) / e;
        out += sign * binom * term;
        binom = binom * (b - 1 - k) / (k + 1);
    }
    return out;
}

double beta_quadrature_oracle(double a, double b, double f1, double f2)
{
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto f = [=](double r, double rc) {
        // rc > 0 is f2 - r, exact near the right endpoint.
        double const one_minus = rc > 0 ? 1.0 - f2 + rc : 1.0 - r;
        return std::pow(r, a - 1.0) * std::pow(one_minus, b - 1.0);
    };
    return integrator.integrate(f, f1, f2, 1e-13);
}

double zeta_monte_carlo(double t, double lam, double sigma2, double q1, double q2,
                        int dim, std::size_t n_centroids, std::uint64_t seed)
{
    auto const d = static_cast<std::size_t>(dim);
    double const u = sigma2 + t;
    // c1 = (1, ..., 1) and x = a c1 + b g with g centred, mean square 1, so
    // every coordinate stays O(1) and the per-coordinate averages do not underflow.
    double const a = (q2 - q1 + 1.0) / 2.0;
    double const b = std::sqrt(std::max(0.0, q2 - a * a));
    CounterRng const grng(seed, stream_id("zeta-oracle-x"));
    std::vector<double> x(d);
    grng.normals(0, 0, x);
    double mean = 0.0;
    for (double v : x)
        mean += v / static_cast<double>(d);
    double msq = 0.0;
    for (double& v : x)
    {
        v -= mean;
        msq += v * v / static_cast<double>(d);
    }
    for (double& v : x)
        v = a + b * v / std::sqrt(msq);
    double dist1 = 0.0;
    for (double v : x)
        dist1 += (v - 1.0) * (v - 1.0);

    CounterRng const rng(seed, stream_id("zeta-oracle"));
    std::vector<double> row(d);
    std::vector<double> sums(d, 0.0);
    for (std::size_t k = 0; k < n_centroids; ++k)
    {
        rng.normals(k, 0, row);
        for (std::size_t j = 0; j < d; ++j)
        {
            double const diff = x[j] - row[j];
            sums[j] += std::exp(-lam * diff * diff / (2.0 * u));
        }
    }
    double total = lam * dist1 / (2.0 * u);
    for (double s : sums)
        total += std::log(s / static_cast<double>(n_centroids));
    return total / static_cast<double>(d);
}

OdeMoments guided_moment_ode(double t, double horizon, double s, double r,
                             GuidanceSchedule const& sched, OdeMoments init,
                             int n_steps)
{
    // y = log(s + tau); d/dy = (s + tau) d/dtau, integrated downward.
    auto rhs = [&](double y, double m, double v) {
        double const tau = std::exp(y) - s;
        double const w = sched.at(tau);
        double const k = -(1.0 + w) / (s + tau) + w / (r + tau);
        // Backward time: dm/d(-tau) = k m + (1 + w)/(s + tau) for unit mean.
        double const dm = k * m + (1.0 + w) / (s + tau);
        double const dv = 2.0 * k * v + 1.0;
        return std::pair{-dm * (s + tau), -dv * (s + tau)};
    };
    double const y0 = std::log(s + horizon);
    double const y1 = std::log(s + t);
    double const h = (y1 - y0) / n_steps;
    double m = init.mean_coeff;
    double v = init.variance;
    for (int i = 0; i < n_steps; ++i)
    {
        double const y = y0 + h * i;
        auto [k1m, k1v] = rhs(y, m, v);
        auto [k2m, k2v] = rhs(y + h / 2, m + h / 2 * k1m, v + h / 2 * k1v);
        auto [k3m, k3v] = rhs(y + h / 2, m + h / 2 * k2m, v + h / 2 * k2v);
        auto [k4m, k4v] = rhs(y + h, m + h * k3m, v + h * k3v);
        m += h / 6 * (k1m + 2 * k2m + 2 * k3m + k4m);
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    return {m, v};
}

std::vector<double> fd_gradient(std::function<double(std::span<const double>)> const& f,
                                std::span<const double> x, double h)
{
    double norm = 0.0;
    for (double xi : x)
        norm += xi * xi;
    double const step = h * (1.0 + std::sqrt(norm));
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        probe[i] = x[i] + step;
        double const up = f(probe);
        probe[i] = x[i] - step;
        double const down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

namespace
{
double gaussian_log_kernel(std::span<const double> x, double const* c, double u)
{
    double sq = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        sq += (x[j] - c[j]) * (x[j] - c[j]);
    return -sq / (2.0 * u) -
           0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi * u);
}
}  // namespace

double mixture_log_density(MixtureInstance const& inst, std::span<const double> x, double t)
{
    double const u = inst.sigma2 + t;
    auto const d = static_cast<std::size_t>(inst.dim);
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(inst.count);
    for (std::size_t mu = 0; mu < inst.count; ++mu)
    {
        terms[mu] = gaussian_log_kernel(x, inst.centroids.data() + mu * d, u);
        hi = std::max(hi, terms[mu]);
    }
    double acc = 0.0;
    for (double v : terms)
        acc += std::exp(v - hi);
    return hi + std::log(acc / static_cast<double>(inst.count));
}

double target_log_density(MixtureInstance const& inst, std::span<const double> x, double t)
{
    return gaussian_log_kernel(x, inst.target().data(), inst.sigma2 + t);
}
}  // namespace cfgdist::app
