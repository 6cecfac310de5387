// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file special_math.hpp
//! Numerical kernels shared by the theory modules: adaptive Gauss-Kronrod
//! quadrature, definite incomplete Beta integrals, bracketed root finding and
//! overflow-safe log-sum-exp.
#pragma once

#include <functional>
#include <span>

namespace cfgdist
{
struct QuadratureSettings
{
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 2000;

    void validate() const;
};

//! Arguments of the definite integral \f$\int_{f_1}^{f_2} r^{a-1}(1-r)^{b-1}dr\f$.
struct BetaArgs
{
    double a;
    double b;
    double f1;
    double f2;

    void validate() const;
};

using Integrand = std::function<double(double)>;

//! Adaptive 7/15-point Gauss-Kronrod quadrature on [lo, hi].
//!
//! Intervals are bisected in order of decreasing local error estimate until
//! the summed estimate drops below max(abs_tol, rel_tol * |result|). The
//! integrand is never evaluated at the endpoints, so integrable endpoint
//! singularities are tolerated (slowly).
double adaptive_quad(Integrand const& f, double lo, double hi,
                     QuadratureSettings const& q = {});

//! Integral over [lo, inf) via the map t = lo + x / (1 - x) onto [0, 1).
double adaptive_quad_to_infinity(Integrand const& f, double lo,
                                 QuadratureSettings const& q = {});

//! B_{f2}(a, b) - B_{f1}(a, b).
//!
//! Negative or zero a is allowed as long as f1 > 0. Near r = 1 the factor
//! (1-r)^{b-1} is absorbed by the substitution v = (1-r)^b, and near r = 0 a
//! small positive a is absorbed by v = r^a, so the remaining integrand is
//! bounded.
double incomplete_beta_definite(BetaArgs const& args,
                                QuadratureSettings const& q = {});

//! Bisection on a sign-changing bracket; returns the midpoint of the final
//! bracket of width <= tol.
double bisection_root(std::function<double(double)> const& g, double lo,
                      double hi, double tol);

//! log(sum(exp(v))). All -inf entries yield -inf.
double log_sum_exp(std::span<const double> values);

//! expm1(k * log1p(x)) / x, continuous at x = 0 (value k). Requires x > -1.
double powm1_ratio(double k, double x);
}  // namespace cfgdist
