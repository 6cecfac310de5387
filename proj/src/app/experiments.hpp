// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file experiments.hpp
//! Simulation runs paired with their theory values, shared by the CLI and
//! the acceptance suite.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfgdist/joint_gaussian.hpp"
#include "cfgdist/mixture_rem.hpp"
#include "cfgdist/simulator.hpp"

namespace cfgdist::app
{
struct MixtureRun
{
    int dim = 10;
    double beta = 0.5;
    double sigma2 = 0.5;
    double w = 0.0;
    std::size_t n_samples = 1000;
    int n_steps = 2000;
    double horizon_T = 500.0;
    std::uint64_t seed = 0;
    int workers = 0;
    bool normalize_target = true;
};

struct MixtureOutcome
{
    std::size_t centroids = 0;
    EmpiricalDistortion empirical;
    DistortionReport theory;
    //! Samples at t = 0.
    SampleSet samples;
};

//! Grid log-spaced in sigma2 + t; theory at T -> inf.
MixtureOutcome run_mixture(MixtureRun const& run);

struct JointRun
{
    int dim = 9;
    double w = 0.0;
    std::size_t n_samples = 1000;
    int n_steps = 2000;
    double horizon_T = 500.0;
    //! Seeds both the random model and the diffusion.
    std::uint64_t seed = 0;
    int workers = 0;
};

struct JointOutcome
{
    JointGaussianModel model;
    GaussianGuidedMoments theory;
    GaussianSampleMoments simulated;
    //! |mean| / |mu| and |Sigma|_F / |Sigma_cond|_F.
    double mean_ratio_theory = 0.0;
    double mean_ratio_simulated = 0.0;
    double frobenius_ratio_theory = 0.0;
    double frobenius_ratio_simulated = 0.0;
    SampleSet samples;
};

//! Grid log-spaced in min(s) + t; theory at T -> inf.
JointOutcome run_joint(JointRun const& run);
}  // namespace cfgdist::app
