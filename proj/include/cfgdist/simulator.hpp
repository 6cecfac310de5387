// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file simulator.hpp
//! Euler-Maruyama integration of the guided backward SDE
//!   x_{t - dt} = x_t + s(x_t, t) dt + sqrt(dt) xi
//! with exact scores, and empirical distortion estimates.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfgdist/joint_gaussian.hpp"
#include "cfgdist/schedule.hpp"
#include "cfgdist/score_kernels.hpp"

namespace cfgdist
{
enum class TimeGrid
{
    log_spaced,
    uniform,
};

struct SimConfig
{
    int dim = 1;
    std::size_t n_samples = 2;
    std::uint64_t seed = 0;
    double horizon_T = 500.0;
    int n_steps = 2000;
    TimeGrid grid = TimeGrid::log_spaced;
    //! The log grid is uniform in log(grid_offset + t).
    double grid_offset = 1.0;
    GuidanceSchedule schedule = GuidanceSchedule::constant(0.0);
    std::vector<double> checkpoints{0.0};
    //! 0 means std::thread::hardware_concurrency().
    int workers = 0;

    void validate() const;
};

//! Descending times from horizon_T to exactly 0, with checkpoints merged in.
std::vector<double> time_grid(SimConfig const& config);

//! Batched guided drift s(x, t) for a fixed w.
class DriftModel
{
  public:
    virtual ~DriftModel() = default;
    virtual int dim() const = 0;
    //! xs and out are batch x dim, row-major.
    virtual void drift(std::span<const double> xs, double t, double w,
                       std::span<double> out) const = 0;
    //! Mean of the initial state x_T.
    virtual void initial_mean(std::span<double> out) const;
};

struct MixtureInstance
{
    int dim = 0;
    std::size_t count = 0;
    //! count x dim, row-major; row target_index is c1.
    std::vector<double> centroids;
    std::size_t target_index = 0;
    double sigma2 = 1.0;
    kernels::CentroidPanel panel;

    std::span<const double> target() const
    {
        return {centroids.data() + target_index * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

inline constexpr std::size_t kCentroidBudget = 100'000'000;
inline constexpr double kMaxExponentialCount = 5e4;

//! Standard normal centroids. With normalize_target the first row is
//! rescaled to |c1|^2 = d, the value assumed by the mean-field reduction.
//! Throws BudgetError above kCentroidBudget entries.
MixtureInstance sample_centroids(int dim, std::size_t count, std::uint64_t seed,
                                 double sigma2, bool normalize_target = true);

//! round(exp(beta d)); throws BudgetError when beta d > log(kMaxExponentialCount).
std::size_t centroid_count(double beta, int dim);

class MixtureDrift final : public DriftModel
{
  public:
    explicit MixtureDrift(MixtureInstance const& inst,
                          kernels::Isa isa = kernels::default_isa());
    int dim() const override { return inst_->dim; }
    void drift(std::span<const double> xs, double t, double w,
               std::span<double> out) const override;

  private:
    MixtureInstance const* inst_;
    kernels::WeightedMeanFn mean_fn_;
};

//! (1+w)(c1 - x)/u + w sum_mu gamma_mu (c_mu - x)/u with u = sigma2 + t.
std::vector<double> mixture_guided_score(std::span<const double> x, double t,
                                         MixtureInstance const& inst, double w,
                                         kernels::Isa isa = kernels::Isa::scalar);

class JointGaussianDrift final : public DriftModel
{
  public:
    explicit JointGaussianDrift(JointGaussianModel const& model);
    int dim() const override { return model_->dim(); }
    void drift(std::span<const double> xs, double t, double w,
               std::span<double> out) const override;
    void initial_mean(std::span<double> out) const override;

  private:
    JointGaussianModel const* model_;
    std::vector<double> basis_;  // row-major copy of V
};

struct SampleSet
{
    double t = 0.0;
    int dim = 0;
    std::size_t n = 0;
    //! n x dim, row-major.
    std::vector<double> data;

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
    matrix() const
    {
        return {data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim)};
    }
};

//! Samples at each checkpoint, in descending time order. Output is
//! bit-identical for any worker count. Throws NumericalError on a
//! non-finite state.
std::vector<SampleSet> integrate_backward(SimConfig const& config,
                                          DriftModel const& model);

struct Estimate
{
    double value = 0.0;
    double std_error = 0.0;
};

struct EmpiricalDistortion
{
    Estimate delta_mu;
    Estimate delta_sigma2;
    std::size_t n_samples = 0;
};

//! delta_mu = c1 . (xbar - c1) / d and delta_sigma2 = (s^2 - sigma2) / sigma2
//! with the unbiased per-coordinate variance s^2; bootstrap standard errors.
EmpiricalDistortion measure_distortion(SampleSet const& samples,
                                       std::span<const double> c1, double sigma2,
                                       std::uint64_t seed, int n_boot = 200);

struct GaussianSampleMoments
{
    Eigen::VectorXd mean;
    Eigen::VectorXd mean_std_error;
    //! Unbiased variance along each basis column.
    Eigen::VectorXd eigen_variance;
    Eigen::MatrixXd covariance;
};

GaussianSampleMoments gaussian_sample_moments(SampleSet const& samples,
                                              Eigen::MatrixXd const& basis);
}  // namespace cfgdist
