// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file oracles.hpp
//! Reference computations that share no code with the library paths they
//! check.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cfgdist/schedule.hpp"
#include "cfgdist/simulator.hpp"

namespace cfgdist::app
{
//! Integral of r^(a-1) (1-r)^(b-1) over [f1, f2] for a positive integer b,
//! by binomial expansion. Requires a + k != 0 for k < b, and f1 > 0 if a <= 0.
double beta_polynomial_oracle(double a, int b, double f1, double f2);

//! Same integral by tanh-sinh quadrature (Boost.Math).
double beta_quadrature_oracle(double a, double b, double f1, double f2);

//! (1/d) log E_c exp(-lam (|x-c|^2 - |x-c1|^2) / (2u)) over `n_centroids`
//! standard normal centroids, in d dimensions with c1 = (1, ..., 1),
//! |x - c1|^2 = q1 d and |x|^2 = q2 d. The expectation factorizes over
//! coordinates; each factor is averaged over the same sampled centroids.
double zeta_monte_carlo(double t, double lam, double sigma2, double q1, double q2,
                        int dim, std::size_t n_centroids, std::uint64_t seed);

struct OdeMoments
{
    double mean_coeff;
    double variance;
};

//! RK4 in log(s + t) on the per-coordinate moment ODEs of the guided SDE with
//! conditional variance s, unconditional variance r, and w(t) from `sched`,
//! from (mean_coeff, variance) = init at `horizon` down to t.
OdeMoments guided_moment_ode(double t, double horizon, double s, double r,
                             GuidanceSchedule const& sched, OdeMoments init,
                             int n_steps);

//! Central-difference gradient with step h * (1 + |x|).
std::vector<double> fd_gradient(std::function<double(std::span<const double>)> const& f,
                                std::span<const double> x, double h);

//! log p_t(x) for the mixture and log p_t(x | c1), from first principles.
double mixture_log_density(MixtureInstance const& inst, std::span<const double> x, double t);
double target_log_density(MixtureInstance const& inst, std::span<const double> x, double t);
}  // namespace cfgdist::app
