// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file joint_gaussian.hpp
//! Guided moments for a Gaussian target whose conditional and unconditional
//! covariances share an eigenbasis.
//!
//! Along eigendirection i the guided mean is lambda_i(t) times the conditional
//! mean component and the guided variance is Lambda_i(t) (s_i + t).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfgdist/schedule.hpp"
#include "cfgdist/special_math.hpp"

namespace cfgdist
{
class JointGaussianModel
{
  public:
    //! `basis` columns are eigenvectors; r and s are the unconditional and
    //! conditional eigenvalues. Throws DomainError unless basis is orthogonal
    //! (1e-10) and 0 < s_i <= r_i.
    JointGaussianModel(Eigen::MatrixXd basis, Eigen::VectorXd r,
                       Eigen::VectorXd s, Eigen::VectorXd mu);

    //! Seeded random model: orthogonalized standard-normal basis, r sorted
    //! descending in (0.5, 1.5], s = u r with u uniform in (0.3, 1], mu
    //! standard normal.
    static JointGaussianModel random(int dim, std::uint64_t seed);

    int dim() const { return static_cast<int>(r_.size()); }
    Eigen::MatrixXd const& basis() const { return basis_; }
    Eigen::VectorXd const& r() const { return r_; }
    Eigen::VectorXd const& s() const { return s_; }
    Eigen::VectorXd const& mu() const { return mu_; }
    //! V^T mu
    Eigen::VectorXd const& mu_eigen() const { return mu_eigen_; }

    //! V diag(values) V^T
    Eigen::MatrixXd dense(Eigen::VectorXd const& eigenvalues) const;

  private:
    Eigen::MatrixXd basis_;
    Eigen::VectorXd r_;
    Eigen::VectorXd s_;
    Eigen::VectorXd mu_;
    Eigen::VectorXd mu_eigen_;
};

//! lambda(t) for constant guidance. Requires 0 < s <= r, t >= 0, w > -1/2.
double mean_coeff(double s, double r, double w, double t);
//! Lambda(t) for constant guidance; same preconditions.
double cov_coeff(double s, double r, double w, double t);

//! lambda(t) for w(t) = w0 + omega t, via definite incomplete Beta integrals.
//! omega = 0 falls back to the constant form. For s = r and omega > 0 the
//! defining integral diverges and +inf is returned.
double mean_coeff_linear(double s, double r, LinearGuidance sched, double t,
                         QuadratureSettings const& q = {});
//! Lambda(t) for the linear schedule. s = r is integrated in the time domain.
double cov_coeff_linear(double s, double r, LinearGuidance sched, double t,
                        QuadratureSettings const& q = {});

//! Dispatch on the schedule form.
double mean_coeff(double s, double r, GuidanceSchedule const& sched, double t,
                  QuadratureSettings const& q = {});
double cov_coeff(double s, double r, GuidanceSchedule const& sched, double t,
                 QuadratureSettings const& q = {});

//! Lambda(t) as Z(t)^2 / (s+t) * int_t^inf Z(t')^-2 dt' with
//! log Z' = p/(s+t) - q/(r+t).
double cov_coeff_time_domain(double s, double r, LinearGuidance sched,
                             double t, QuadratureSettings const& q = {});

struct GaussianGuidedMoments
{
    Eigen::VectorXd mean;
    //! Covariance eigenvalues in the model basis.
    Eigen::VectorXd cov_eigenvalues;
};

GaussianGuidedMoments guided_moments(JointGaussianModel const& model,
                                     GuidanceSchedule const& sched, double t,
                                     QuadratureSettings const& q = {});

struct GaussianScores
{
    Eigen::VectorXd conditional;
    Eigen::VectorXd unconditional;
};

//! -(Sigma_x|c + tI)^-1 (x - cond_mean) and -(Sigma_xx + tI)^-1 x.
GaussianScores exact_scores(JointGaussianModel const& model,
                            Eigen::VectorXd const& cond_mean,
                            Eigen::VectorXd const& x, double t);
inline GaussianScores exact_scores(JointGaussianModel const& model,
                                   Eigen::VectorXd const& x, double t)
{
    return exact_scores(model, model.mu(), x, t);
}

//! Closed-form log densities, used as finite-difference references.
double log_density_conditional(JointGaussianModel const& model,
                               Eigen::VectorXd const& x, double t);
double log_density_unconditional(JointGaussianModel const& model,
                                 Eigen::VectorXd const& x, double t);
}  // namespace cfgdist
