// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "cfgdist/mixture_rem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfgdist/error.hpp"
#include "cfgdist/joint_gaussian.hpp"

namespace cfgdist
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

// exp(k * log_hi) * expm1(k * gap) / k, continuous at k = 0.
double scaled_pow_diff(double k, double log_hi, double gap)
{
    double const ratio = k == 0.0 ? gap : std::expm1(k * gap) / k;
    return std::exp(k * log_hi) * ratio;
}

void check_time(double t)
{
    detail::require(std::isfinite(t) && t >= 0, "time must be finite and >= 0");
}

void check_sigma2(double sigma2)
{
    detail::require(std::isfinite(sigma2) && sigma2 > 0, "sigma2 must be > 0");
}

void check_horizon(std::optional<double> horizon, double t)
{
    if (!horizon)
        return;
    detail::require(std::isfinite(*horizon) && *horizon > 0, "horizon must be > 0");
    detail::require(t <= *horizon, "time exceeds the horizon");
}

double constant_w(GuidanceSchedule const& sched)
{
    auto const* c = std::get_if<ConstantGuidance>(&sched.form());
    detail::require(c != nullptr, "operation requires a constant schedule");
    return c->w;
}

// Log of the guided-phase propagator for w(t) = w0 + omega t:
// log Z = k log u + m log(u + 1).
double log_propagator(double u, double sigma2, LinearGuidance sched)
{
    double const k = 1.0 + sched.w0 - sched.omega * sigma2;
    double const m = sched.omega * (1.0 + sigma2) - sched.w0;
    return k * std::log(u) + m * std::log1p(u);
}

double typical_zeta(double t, double sigma2, double w, std::optional<double> horizon)
{
    GuidedMoments const m = horizon
        ? guided_phase_moments(t, horizon, sigma2, w, noise_prior(*horizon))
        : guided_phase_moments(t, sigma2, w);
    double const a = m.mean_coeff;
    return zeta(t, 1.0, sigma2, (a - 1.0) * (a - 1.0) + m.variance, a * a + m.variance);
}
}  // namespace

std::string_view to_string(Phase p)
{
    return p == Phase::guided ? "guided" : "conditional";
}

void MixtureTheoryParams::validate() const
{
    check_sigma2(sigma2);
    detail::require(beta >= 0, "beta must be >= 0 (inf allowed)");
    if (horizon)
        detail::require(std::isfinite(*horizon) && *horizon > 0, "horizon must be > 0");
}

double zeta(double t, double lam, double sigma2, double q1, double q2)
{
    double const u = sigma2 + t;
    detail::require(u > 0 && u + lam > 0, "zeta requires sigma2+t > 0 and sigma2+t+lambda > 0");
    return lam * q1 / (2.0 * u) - 0.5 * std::log1p(lam / u) -
           lam * q2 / (2.0 * (u + lam));
}

double zeta_prime(double t, double lam, double sigma2, double q1, double q2)
{
    double const u = sigma2 + t;
    detail::require(u > 0 && u + lam > 0, "zeta requires sigma2+t > 0 and sigma2+t+lambda > 0");
    double const ul = u + lam;
    return q1 / (2.0 * u) - 1.0 / (2.0 * ul) - q2 * u / (2.0 * ul * ul);
}

double zeta_typical(double t, double sigma2, double w)
{
    return typical_zeta(t, sigma2, w, std::nullopt);
}

std::optional<double> speciation_time(double sigma2, double beta, double w,
                                      std::optional<double> horizon)
{
    check_sigma2(sigma2);
    detail::require(beta >= 0, "beta must be >= 0 (inf allowed)");
    detail::require(std::isfinite(w) && w > -0.5, "constant guidance requires w > -1/2");
    if (std::isinf(beta))
        return std::nullopt;

    auto g = [=](double t) { return beta + typical_zeta(t, sigma2, w, horizon); };
    constexpr int kPoints = 400;
    double const log_lo = std::log(1e-6);
    double const log_hi = std::log(horizon ? std::min(1e8, *horizon) : 1e8);

    double upper = std::exp(log_hi);
    if (g(upper) <= 0.0)
        return horizon ? *horizon : kInf;
    for (int i = kPoints - 2; i >= -1; --i)
    {
        // i = -1 closes the scan with the segment [0, 1e-6].
        double const lower = i >= 0 ? std::exp(log_lo + (log_hi - log_lo) * i / (kPoints - 1)) : 0.0;
        if (g(lower) <= 0.0)
            return bisection_root(g, lower, upper, std::max(1e-300, 1e-13 * upper));
        upper = lower;
    }
    return std::nullopt;
}

std::optional<double> speciation_time(MixtureTheoryParams const& params)
{
    params.validate();
    return speciation_time(params.sigma2, params.beta, constant_w(params.schedule),
                           params.horizon);
}

std::optional<double> condensation_lambda(double t, double sigma2, double beta,
                                          double q2)
{
    check_time(t);
    check_sigma2(sigma2);
    detail::require(std::isfinite(beta) && beta >= 0, "beta must be >= 0");
    if (beta == 0.0)
        return 0.0;
    double const u = sigma2 + t;
    auto h = [=](double lam) {
        double const ul = u + lam;
        return beta - 0.5 * std::log1p(lam / u) +
               lam / (2.0 * ul) * (1.0 - lam * q2 / ul);
    };
    constexpr int kPoints = 600;
    double const log_lo = std::log(1e-10);
    double const log_hi = std::log(1e8);
    double lower = 0.0;
    for (int i = 0; i < kPoints; ++i)
    {
        double const upper = std::exp(log_lo + (log_hi - log_lo) * i / (kPoints - 1));
        if (h(upper) <= 0.0)
            return bisection_root(h, lower, upper, std::max(1e-300, 1e-13 * upper));
        lower = upper;
    }
    return std::nullopt;
}

GuidedMoments noise_prior(double horizon)
{
    detail::require(std::isfinite(horizon) && horizon > 0, "horizon must be > 0");
    return {horizon, 0.0, horizon, Phase::guided};
}

GuidedMoments guided_phase_moments(double t, std::optional<double> horizon,
                                   double sigma2, double w,
                                   GuidedMoments const& init)
{
    check_time(t);
    check_sigma2(sigma2);
    check_horizon(horizon, t);
    detail::require(std::isfinite(w) && (horizon ? w >= -1.0 : w > -0.5),
                    "guidance level out of range");
    double const u = sigma2 + t;
    double const log_y = std::log1p(1.0 / u);
    // With y = 1 + 1/u the propagator is u y^{-w}.
    if (!horizon)
    {
        double const a = u * std::exp(-w * log_y) * std::expm1((1.0 + w) * log_y);
        double const k = 2.0 * w + 1.0;
        double const v = u * u * std::exp(-2.0 * w * log_y) * std::expm1(k * log_y) / k;
        return {t, a, v, Phase::guided};
    }
    double const big_u = sigma2 + *horizon;
    double const log_y_end = std::log1p(1.0 / big_u);
    double const log_z = std::log(u) - w * log_y;
    double const log_rho = log_z - std::log(big_u) + w * log_y_end;
    double const rho = std::exp(log_rho);
    double const gap = log_y - log_y_end;
    double const a = rho * init.mean_coeff +
                     std::exp(log_z) * (1.0 + w) * scaled_pow_diff(1.0 + w, log_y_end, gap);
    double const v = rho * rho * init.variance +
                     std::exp(2.0 * log_z) * scaled_pow_diff(2.0 * w + 1.0, log_y_end, gap);
    return {t, a, v, Phase::guided};
}

GuidedMoments guided_phase_moments(double t, double sigma2, double w)
{
    return guided_phase_moments(t, std::nullopt, sigma2, w, {});
}

GuidedMoments conditional_phase_moments(double t, double t_start, double sigma2,
                                        GuidedMoments const& init)
{
    check_time(t);
    check_sigma2(sigma2);
    detail::require(t <= t_start, "conditional phase runs from t_start down to t");
    double const u = sigma2 + t;
    if (std::isinf(t_start))
        return {t, 1.0, u, Phase::conditional};
    if (t == t_start)
        return {t, init.mean_coeff, init.variance, Phase::conditional};
    double const big_u = sigma2 + t_start;
    double const ratio = u / big_u;
    double const elapsed = t_start - t;
    return {t, ratio * init.mean_coeff + elapsed / big_u,
            ratio * ratio * init.variance + elapsed * ratio, Phase::conditional};
}

std::pair<double, double> distortion_from_moments(GuidedMoments const& m,
                                                  double sigma2)
{
    double const u = sigma2 + m.t;
    return {m.mean_coeff - 1.0, (m.variance - u) / u};
}

namespace
{
GuidedMoments constant_trajectory_point(double t, double sigma2, double w,
                                        std::optional<double> horizon,
                                        std::optional<double> t_speciation)
{
    auto guided = [&](double at) {
        return horizon ? guided_phase_moments(at, horizon, sigma2, w, noise_prior(*horizon))
                       : guided_phase_moments(at, sigma2, w);
    };
    if (!t_speciation || t >= *t_speciation)
        return guided(t);
    if (std::isinf(*t_speciation))
        return conditional_phase_moments(t, kInf, sigma2, {});
    if (horizon && *t_speciation >= *horizon)
        return conditional_phase_moments(t, *horizon, sigma2, noise_prior(*horizon));
    return conditional_phase_moments(t, *t_speciation, sigma2, guided(*t_speciation));
}
}  // namespace

std::pair<std::vector<GuidedMoments>, DistortionReport>
assemble_trajectory(MixtureTheoryParams const& params,
                    std::vector<double> const& t_grid)
{
    params.validate();
    double const w = constant_w(params.schedule);
    std::optional<double> const ts = speciation_time(params);

    std::vector<GuidedMoments> out;
    out.reserve(t_grid.size());
    for (double t : t_grid)
    {
        check_time(t);
        check_horizon(params.horizon, t);
        out.push_back(constant_trajectory_point(t, params.sigma2, w, params.horizon, ts));
    }
    GuidedMoments const at_zero =
        constant_trajectory_point(0.0, params.sigma2, w, params.horizon, ts);
    auto const [dmu, dsig] = distortion_from_moments(at_zero, params.sigma2);
    return {std::move(out), DistortionReport{dmu, dsig, ts, at_zero.phase}};
}

std::pair<double, double>
delta_estimators_constant(double t, double sigma2, double w,
                          std::optional<double> t_speciation)
{
    return distortion_from_moments(
        constant_trajectory_point(t, sigma2, w, std::nullopt, t_speciation), sigma2);
}

GuidedMoments guided_moments_linear_schedule(double t, double sigma2,
                                             LinearGuidance sched,
                                             QuadratureSettings const& q,
                                             std::optional<double> horizon)
{
    check_time(t);
    check_sigma2(sigma2);
    check_horizon(horizon, t);
    // The guided-phase drift is that of a Gaussian pair with conditional
    // variance sigma2 and unconditional variance sigma2 + 1.
    double const s = sigma2;
    double const r = sigma2 + 1.0;
    double const u = sigma2 + t;
    auto limit = [&](double at) {
        return std::pair{mean_coeff_linear(s, r, sched, at, q),
                         cov_coeff_linear(s, r, sched, at, q) * (sigma2 + at)};
    };
    auto [a, v] = limit(t);
    if (horizon)
    {
        auto const [a_end, v_end] = limit(*horizon);
        GuidedMoments const init = noise_prior(*horizon);
        double const rho = std::exp(log_propagator(u, sigma2, sched) -
                                    log_propagator(sigma2 + *horizon, sigma2, sched));
        a += rho * (init.mean_coeff - a_end);
        v += rho * rho * (init.variance - v_end);
    }
    if (!std::isfinite(a) || !std::isfinite(v))
        throw NumericalError("linear-schedule moments are not finite");
    return {t, a, v, Phase::guided};
}

std::pair<double, double>
delta_estimators_linear(double t, double sigma2, LinearGuidance sched,
                        QuadratureSettings const& q, std::optional<double> horizon)
{
    return distortion_from_moments(
        guided_moments_linear_schedule(t, sigma2, sched, q, horizon), sigma2);
}

std::optional<double> sanity_schedule_speciation(double sigma2, double beta)
{
    check_sigma2(sigma2);
    detail::require(std::isfinite(beta) && beta >= 0, "beta must be >= 0");
    if (beta <= 0.5)
        return std::nullopt;
    double const ts = 1.0 / std::expm1(2.0 * beta - 1.0) - sigma2;
    if (!(ts > 0.0))
        return std::nullopt;
    return ts;
}

PotentialWell potential_minimum_and_width(double t, double sigma2, double w)
{
    check_time(t);
    check_sigma2(sigma2);
    double const u = sigma2 + t;
    detail::require(std::isfinite(w) && u + 1.0 + w > 0, "potential well requires sigma2+t+1+w > 0");
    return {(1.0 + w) * (u + 1.0) / (w + u + 1.0), u * (u + 1.0) / (u + 1.0 + w)};
}
}  // namespace cfgdist
