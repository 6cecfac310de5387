// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "experiments.hpp"

namespace cfgdist::app
{
MixtureOutcome run_mixture(MixtureRun const& run)
{
    MixtureOutcome out;
    out.centroids = centroid_count(run.beta, run.dim);
    MixtureInstance const inst =
        sample_centroids(run.dim, out.centroids, run.seed, run.sigma2, run.normalize_target);
    MixtureDrift const drift(inst);

    SimConfig config;
    config.dim = run.dim;
    config.n_samples = run.n_samples;
    config.seed = run.seed;
    config.horizon_T = run.horizon_T;
    config.n_steps = run.n_steps;
    config.grid_offset = run.sigma2;
    config.schedule = GuidanceSchedule::constant(run.w);
    config.workers = run.workers;
    out.samples = std::move(integrate_backward(config, drift).back());
    out.empirical = measure_distortion(out.samples, inst.target(), run.sigma2, run.seed);

    MixtureTheoryParams const params{run.sigma2, run.beta, config.schedule, {}};
    out.theory = assemble_trajectory(params, {}).second;
    return out;
}

JointOutcome run_joint(JointRun const& run)
{
    JointGaussianModel model = JointGaussianModel::random(run.dim, run.seed);
    JointGaussianDrift const drift(model);

    SimConfig config;
    config.dim = run.dim;
    config.n_samples = run.n_samples;
    config.seed = run.seed;
    config.horizon_T = run.horizon_T;
    config.n_steps = run.n_steps;
    config.grid_offset = model.s().minCoeff();
    config.schedule = GuidanceSchedule::constant(run.w);
    config.workers = run.workers;
    SampleSet samples = std::move(integrate_backward(config, drift).back());

    auto theory = guided_moments(model, config.schedule, 0.0);
    auto simulated = gaussian_sample_moments(samples, model.basis());
    double const mu_norm = model.mu().norm();
    double const cond_frob = model.s().norm();

    JointOutcome out{std::move(model), std::move(theory), std::move(simulated),
                     0.0, 0.0, 0.0, 0.0, std::move(samples)};
    out.mean_ratio_theory = out.theory.mean.norm() / mu_norm;
    out.mean_ratio_simulated = out.simulated.mean.norm() / mu_norm;
    out.frobenius_ratio_theory = out.theory.cov_eigenvalues.norm() / cond_frob;
    out.frobenius_ratio_simulated = out.simulated.covariance.norm() / cond_frob;
    return out;
}
}  // namespace cfgdist::app
