// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "cfgdist/joint_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cfgdist/error.hpp"
#include "cfgdist/rng.hpp"

namespace cfgdist
{
namespace
{
void check_pair(double s, double r, double t)
{
    detail::require(std::isfinite(s) && std::isfinite(r) && 0 < s && s <= r,
                    "eigenvalues must satisfy 0 < s <= r");
    detail::require(std::isfinite(t) && t >= 0, "time must be >= 0");
}

void check_linear(LinearGuidance sched)
{
    detail::require(std::isfinite(sched.w0) && sched.w0 >= -1.0,
                    "linear guidance requires w0 >= -1");
    detail::require(std::isfinite(sched.omega) && sched.omega >= 0.0,
                    "linear guidance requires omega >= 0");
}
}  // namespace

JointGaussianModel::JointGaussianModel(Eigen::MatrixXd basis, Eigen::VectorXd r,
                                       Eigen::VectorXd s, Eigen::VectorXd mu)
    : basis_(std::move(basis)), r_(std::move(r)), s_(std::move(s)),
      mu_(std::move(mu))
{
    auto const d = r_.size();
    detail::require(d >= 1, "model dimension must be >= 1");
    detail::require(basis_.rows() == d && basis_.cols() == d && s_.size() == d &&
                        mu_.size() == d,
                    "model shapes disagree");
    Eigen::MatrixXd const gram = basis_.transpose() * basis_;
    detail::require(
        (gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10,
        "basis must be orthogonal");
    for (Eigen::Index i = 0; i < d; ++i)
        check_pair(s_[i], r_[i], 0.0);
    detail::require(mu_.allFinite(), "conditional mean must be finite");
    mu_eigen_ = basis_.transpose() * mu_;
}

JointGaussianModel JointGaussianModel::random(int dim, std::uint64_t seed)
{
    detail::require(dim >= 1, "model dimension must be >= 1");
    auto const n = static_cast<Eigen::Index>(dim);

    CounterRng const basis_rng(seed, stream_id("joint-basis"));
    Eigen::MatrixXd g(n, n);
    std::vector<double> row(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
    {
        basis_rng.normals(static_cast<std::uint64_t>(i), 0, row);
        for (Eigen::Index j = 0; j < n; ++j)
            g(i, j) = row[static_cast<std::size_t>(j)];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        if (qr.matrixQR()(j, j) < 0)
            basis.col(j) *= -1.0;

    CounterRng const spec_rng(seed, stream_id("joint-spectrum"));
    std::vector<double> rs(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        rs[static_cast<std::size_t>(i)] =
            1.5 - CounterRng::to_open_unit(spec_rng.words(i, 0, 0)[0]);
    std::sort(rs.begin(), rs.end(), std::greater<>());

    Eigen::VectorXd r(n);
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        r[i] = rs[static_cast<std::size_t>(i)];
        double const u = 1.0 - 0.7 * CounterRng::to_open_unit(spec_rng.words(i, 1, 0)[0]);
        s[i] = u * r[i];
    }

    CounterRng const mean_rng(seed, stream_id("joint-mean"));
    std::vector<double> m(static_cast<std::size_t>(n));
    mean_rng.normals(0, 0, m);
    Eigen::VectorXd mu = Eigen::Map<Eigen::VectorXd>(m.data(), n);

    return JointGaussianModel(std::move(basis), std::move(r), std::move(s),
                              std::move(mu));
}

Eigen::MatrixXd JointGaussianModel::dense(Eigen::VectorXd const& eigenvalues) const
{
    detail::require(eigenvalues.size() == r_.size(), "eigenvalue count mismatch");
    return basis_ * eigenvalues.asDiagonal() * basis_.transpose();
}

double mean_coeff(double s, double r, double w, double t)
{
    check_pair(s, r, t);
    detail::require(std::isfinite(w) && w > -0.5, "constant guidance requires w > -1/2");
    return powm1_ratio(w + 1.0, (s - r) / (r + t));
}

double cov_coeff(double s, double r, double w, double t)
{
    check_pair(s, r, t);
    detail::require(std::isfinite(w) && w > -0.5, "constant guidance requires w > -1/2");
    double const k = 2.0 * w + 1.0;
    return powm1_ratio(k, (s - r) / (r + t)) / k;
}

double mean_coeff_linear(double s, double r, LinearGuidance sched, double t,
                         QuadratureSettings const& q)
{
    check_pair(s, r, t);
    check_linear(sched);
    if (sched.omega == 0.0)
        return mean_coeff(s, r, sched.w0, t);
    if (s == r)
        return std::numeric_limits<double>::infinity();

    double const p = 1.0 + sched.w0 - sched.omega * s;
    double const b = sched.omega * (r - s);
    double const f = (s + t) / (r + t);
    double const bracket =
        p * incomplete_beta_definite({-p, b + 1.0, f, 1.0}, q) +
        b * incomplete_beta_definite({1.0 - p, b, f, 1.0}, q);
    return std::exp(p * std::log(f) - (1.0 + b) * std::log1p(-f)) * bracket;
}

double cov_coeff_linear(double s, double r, LinearGuidance sched, double t,
                        QuadratureSettings const& q)
{
    check_pair(s, r, t);
    check_linear(sched);
    if (sched.omega == 0.0)
        return cov_coeff(s, r, sched.w0, t);
    if (s == r)
        return cov_coeff_time_domain(s, r, sched, t, q);

    double const p = 1.0 + sched.w0 - sched.omega * s;
    double const b = sched.omega * (r - s);
    double const f = (s + t) / (r + t);
    double const beta =
        incomplete_beta_definite({1.0 - 2.0 * p, 1.0 + 2.0 * b, f, 1.0}, q);
    return std::exp((2.0 * p - 1.0) * std::log(f) -
                    (1.0 + 2.0 * b) * std::log1p(-f)) *
           beta;
}

double cov_coeff_time_domain(double s, double r, LinearGuidance sched, double t,
                             QuadratureSettings const& q)
{
    check_pair(s, r, t);
    check_linear(sched);
    double const p = 1.0 + sched.w0 - sched.omega * s;
    double const qq = sched.w0 - sched.omega * r;
    auto log_z = [=](double x) { return p * std::log(s + x) - qq * std::log(r + x); };
    double const lz = log_z(t);
    auto integrand = [&](double x) { return std::exp(2.0 * (lz - log_z(x))); };
    double const integral = adaptive_quad_to_infinity(integrand, t, q);
    if (!std::isfinite(integral))
        throw ConvergenceError("covariance coefficient integral diverges");
    return integral / (s + t);
}

double mean_coeff(double s, double r, GuidanceSchedule const& sched, double t,
                  QuadratureSettings const& q)
{
    if (auto const* c = std::get_if<ConstantGuidance>(&sched.form()))
        return mean_coeff(s, r, c->w, t);
    return mean_coeff_linear(s, r, std::get<LinearGuidance>(sched.form()), t, q);
}

double cov_coeff(double s, double r, GuidanceSchedule const& sched, double t,
                 QuadratureSettings const& q)
{
    if (auto const* c = std::get_if<ConstantGuidance>(&sched.form()))
        return cov_coeff(s, r, c->w, t);
    return cov_coeff_linear(s, r, std::get<LinearGuidance>(sched.form()), t, q);
}

GaussianGuidedMoments guided_moments(JointGaussianModel const& model,
                                     GuidanceSchedule const& sched, double t,
                                     QuadratureSettings const& q)
{
    auto const d = static_cast<Eigen::Index>(model.dim());
    Eigen::VectorXd projected(d);
    Eigen::VectorXd cov(d);
    for (Eigen::Index i = 0; i < d; ++i)
    {
        double const s = model.s()[i];
        double const r = model.r()[i];
        double const m = model.mu_eigen()[i];
        // An unbounded coefficient only multiplies an exactly zero component.
        projected[i] = m == 0.0 ? 0.0 : mean_coeff(s, r, sched, t, q) * m;
        cov[i] = cov_coeff(s, r, sched, t, q) * (s + t);
    }
    return {model.basis() * projected, std::move(cov)};
}

GaussianScores exact_scores(JointGaussianModel const& model,
                            Eigen::VectorXd const& cond_mean,
                            Eigen::VectorXd const& x, double t)
{
    detail::require(std::isfinite(t) && t >= 0, "time must be >= 0");
    detail::require(x.size() == model.dim() && cond_mean.size() == model.dim(),
                    "vector dimension mismatch");
    Eigen::MatrixXd const& v = model.basis();
    Eigen::VectorXd const y = v.transpose() * x;
    Eigen::VectorXd const yc = y - v.transpose() * cond_mean;
    Eigen::VectorXd cond = -(yc.array() / (model.s().array() + t)).matrix();
    Eigen::VectorXd uncond = -(y.array() / (model.r().array() + t)).matrix();
    return {v * cond, v * uncond};
}

namespace
{
double gaussian_log_density(Eigen::VectorXd const& y, Eigen::VectorXd const& var)
{
    double out = -0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < y.size(); ++i)
        out -= 0.5 * (std::log(var[i]) + y[i] * y[i] / var[i]);
    return out;
}
}  // namespace

double log_density_conditional(JointGaussianModel const& model,
                               Eigen::VectorXd const& x, double t)
{
    Eigen::VectorXd const y = model.basis().transpose() * (x - model.mu());
    return gaussian_log_density(y, (model.s().array() + t).matrix());
}

double log_density_unconditional(JointGaussianModel const& model,
                                 Eigen::VectorXd const& x, double t)
{
    Eigen::VectorXd const y = model.basis().transpose() * x;
    return gaussian_log_density(y, (model.r().array() + t).matrix());
}
}  // namespace cfgdist
