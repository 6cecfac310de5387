// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file mixture_rem.hpp
//! Mean-field theory of guided sampling from a homogeneous mixture of
//! M = exp(beta d) isotropic Gaussians with standard-normal centroids.
//!
//! By isotropy the state at time t reduces to a mean coefficient a(t) (the
//! mean is a(t) c1) and a per-coordinate variance v(t). Above the speciation
//! time the trajectory feels the whole mixture (guided phase); below it only
//! the target mode (conditional phase).
#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "cfgdist/schedule.hpp"
#include "cfgdist/special_math.hpp"

namespace cfgdist
{
enum class Phase
{
    guided,
    conditional,
};

std::string_view to_string(Phase p);

struct GuidedMoments
{
    double t;
    double mean_coeff;
    double variance;
    Phase phase;
};

struct MixtureTheoryParams
{
    double sigma2;
    //! +inf selects the guided-only limit (no speciation).
    double beta;
    GuidanceSchedule schedule;
    //! Absent: the T -> inf limit. Present: start from x_T ~ N(0, T I).
    std::optional<double> horizon;

    void validate() const;
};

struct DistortionReport
{
    double delta_mu;
    double delta_sigma2;
    //! Absent when the trajectory never leaves the guided phase; +inf when it
    //! is conditional throughout (beta = 0).
    std::optional<double> t_speciation;
    Phase phase_at_zero;
};

//! Moment-generating function of the REM energy at lambda, given
//! q1 = |x - c1|^2 / d and q2 = |x|^2 / d.
double zeta(double t, double lam, double sigma2, double q1, double q2);
//! d zeta / d lambda
double zeta_prime(double t, double lam, double sigma2, double q1, double q2);

//! zeta(t, 1, ...) along the typical guided trajectory with constant w and
//! T -> inf, i.e. with q1 = (a-1)^2 + v and q2 = a^2 + v.
double zeta_typical(double t, double sigma2, double w);

//! Root of beta + zeta_typical(t) = 0, scanning a 400-point log grid over
//! [1e-6, 1e8] from the top and bisecting the first sign change.
std::optional<double> speciation_time(double sigma2, double beta, double w,
                                      std::optional<double> horizon = {});
//! Requires a constant schedule.
std::optional<double> speciation_time(MixtureTheoryParams const& params);

//! Smallest positive root in (0, 1e8) of the condensation condition.
//! beta = 0 returns the boundary root 0.
std::optional<double> condensation_lambda(double t, double sigma2, double beta,
                                          double q2);

//! Initial condition x_T ~ N(0, T I): a = 0, v = T.
GuidedMoments noise_prior(double horizon);

//! Guided-phase moments for constant w. Absent horizon is the T -> inf limit
//! (init ignored); otherwise init holds the moments at t = horizon.
GuidedMoments guided_phase_moments(double t, std::optional<double> horizon,
                                   double sigma2, double w,
                                   GuidedMoments const& init);
GuidedMoments guided_phase_moments(double t, double sigma2, double w);

//! Unguided evolution of init from t_start down to t.
GuidedMoments conditional_phase_moments(double t, double t_start, double sigma2,
                                        GuidedMoments const& init);

//! delta_mu = a - 1 and delta_sigma2 = (v - (sigma2+t)) / (sigma2+t).
std::pair<double, double> distortion_from_moments(GuidedMoments const& m,
                                                  double sigma2);

//! Piecewise trajectory on `t_grid` (any order, values >= 0) and the
//! distortion report at t = 0. Requires a constant schedule.
std::pair<std::vector<GuidedMoments>, DistortionReport>
assemble_trajectory(MixtureTheoryParams const& params,
                    std::vector<double> const& t_grid);

//! Distortion at time t for constant w with a known speciation time.
std::pair<double, double>
delta_estimators_constant(double t, double sigma2, double w,
                          std::optional<double> t_speciation);

//! Guided-phase moments for w(t) = w0 + omega t via incomplete Beta integrals.
GuidedMoments guided_moments_linear_schedule(double t, double sigma2,
                                             LinearGuidance sched,
                                             QuadratureSettings const& q = {},
                                             std::optional<double> horizon = {});

std::pair<double, double>
delta_estimators_linear(double t, double sigma2, LinearGuidance sched,
                        QuadratureSettings const& q = {},
                        std::optional<double> horizon = {});

//! Speciation time of the schedule w0 = sigma2 - 1, omega = 1 (exact).
std::optional<double> sanity_schedule_speciation(double sigma2, double beta);

struct PotentialWell
{
    double center_coeff;
    double width2;
};

//! Minimum (as a multiple of c1) and squared width of the guided-phase
//! effective potential.
PotentialWell potential_minimum_and_width(double t, double sigma2, double w);
}  // namespace cfgdist
