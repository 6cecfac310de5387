// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file sweeps.hpp
//! Two-dimensional parameter sweeps over the theory, with region labels.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfgdist/special_math.hpp"

namespace cfgdist
{
enum class AxisScale
{
    linear,
    log,
};

struct Axis
{
    std::string name;
    double min = 0.0;
    double max = 1.0;
    int n_points = 2;
    AxisScale scale = AxisScale::linear;
    //! Exclude `min`: n_points values spaced (max - min)/n_points apart, ending
    //! at max.
    bool open_min = false;

    void validate() const;
    std::vector<double> values() const;
};

struct GridSpec
{
    Axis axis1;
    Axis axis2;
    std::map<std::string, double> fixed;

    void validate() const;
};

enum class Region
{
    separability_and_diversity,
    mean_collapse,
    variance_shrink,
    no_distortion,
};

std::string_view to_string(Region r);

inline constexpr double kNoDistortionTol = 1e-6;
inline constexpr double kSignTol = 1e-9;

//! no_distortion if both |delta| < 1e-6; otherwise variance_shrink if
//! delta_sigma2 < -1e-9, mean_collapse if delta_mu < -1e-9, else
//! separability_and_diversity.
Region classify(double delta_mu, double delta_sigma2);

struct SweepRow
{
    double x1 = 0.0;
    double x2 = 0.0;
    std::optional<double> t_speciation;
    //! a(0) or lambda(0).
    std::optional<double> mean_coeff;
    //! v(0) or Lambda(0).
    std::optional<double> variance_coeff;
    std::optional<double> delta_mu;
    std::optional<double> delta_sigma2;
    std::optional<Region> region;
    //! Non-empty when the cell failed; the numeric fields are then absent.
    std::string error;
};

struct SweepOptions
{
    //! 0 means hardware concurrency.
    int workers = 0;
    QuadratureSettings quadrature{};
    //! Finite horizon for the schedule sweep; absent is T -> inf.
    std::optional<double> horizon;
};

//! Rows in row-major order: axis1 outer, axis2 inner.
//! axis1 = beta, axis2 = w.
std::vector<SweepRow> sweep_beta_w(double sigma2, GridSpec const& grid,
                                   SweepOptions const& opt = {});
//! axis1 = sigma2, axis2 = w.
std::vector<SweepRow> sweep_sigma_w(double beta, GridSpec const& grid,
                                    SweepOptions const& opt = {});
//! axis1 = sigma2, axis2 = beta.
std::vector<SweepRow> sweep_sigma_beta(double w, GridSpec const& grid,
                                       SweepOptions const& opt = {});
//! axis1 = w0, axis2 = omega; guided-only linear-schedule theory.
std::vector<SweepRow> sweep_schedule_phase_diagram(double sigma2, GridSpec const& grid,
                                                   SweepOptions const& opt = {});
//! axis1 = w0, axis2 = omega; labels from (lambda(0) - 1, Lambda(0) - 1).
std::vector<SweepRow> sweep_joint_gaussian_schedule(double r, double s,
                                                    GridSpec const& grid,
                                                    SweepOptions const& opt = {});
}  // namespace cfgdist
