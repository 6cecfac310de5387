// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "cfgdist/error.hpp"
#include "cfgdist/joint_gaussian.hpp"
#include "oracles.hpp"

using namespace cfgdist;

TEST_SUITE("joint_gaussian")
{
    TEST_CASE("constant-guidance coefficients")
    {
        for (double t : {0.0, 0.5, 10.0})
        {
            CHECK(mean_coeff(0.6, 1.0, 0.0, t) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(cov_coeff(0.6, 1.0, 0.0, t) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(mean_coeff(0.8, 0.8, 2.0, t) == doctest::Approx(3.0).epsilon(1e-14));
            CHECK(cov_coeff(0.8, 0.8, 2.0, t) == doctest::Approx(1.0).epsilon(1e-14));
        }
        CHECK(mean_coeff(0.6, 1.0, 1.0, 0.0) == doctest::Approx(1.6).epsilon(1e-14));
        CHECK(cov_coeff(0.6, 1.0, 1.0, 0.0) == doctest::Approx(0.653333333333333).epsilon(1e-12));
        CHECK_THROWS_AS(mean_coeff(1.2, 1.0, 1.0, 0.0), DomainError);
        CHECK_THROWS_AS(cov_coeff(0.5, 1.0, -0.6, 0.0), DomainError);
    }

    TEST_CASE("linear schedule with zero slope is the constant schedule")
    {
        for (int i = 0; i < 100; ++i)
        {
            double const r = 0.2 + 0.05 * i;
            double const s = r * (0.3 + 0.007 * i);
            double const t = 0.1 * (i % 10);
            double const w = 0.02 * i;
            CHECK(mean_coeff_linear(s, r, {w, 0.0}, t) == doctest::Approx(mean_coeff(s, r, w, t)).epsilon(1e-8));
            CHECK(cov_coeff_linear(s, r, {w, 0.0}, t) == doctest::Approx(cov_coeff(s, r, w, t)).epsilon(1e-8));
        }
    }

    TEST_CASE("linear schedule against the moment ODE")
    {
        // Start the ODE at a large T from the noise prior; the guidance
        // there dominates so pick omega (r - s) >= 2 for a short transient.
        struct Case
        {
            double s, r, w0, omega, t;
        };
        for (Case c : {Case{0.6, 1.0, -0.75, 5.0, 0.0}, Case{0.3, 1.0, 0.2, 3.0, 0.5}, Case{0.5, 1.5, 0.0, 2.5, 0.1}})
        {
            auto const sched = GuidanceSchedule::linear(c.w0, c.omega);
            double const horizon = 1e4;
            auto const ode = app::guided_moment_ode(c.t, horizon, c.s, c.r, sched, {1.0, horizon}, 40000);
            CHECK(mean_coeff_linear(c.s, c.r, {c.w0, c.omega}, c.t) == doctest::Approx(ode.mean_coeff).epsilon(1e-4));
            CHECK(cov_coeff_linear(c.s, c.r, {c.w0, c.omega}, c.t) ==
                  doctest::Approx(ode.variance / (c.s + c.t)).epsilon(1e-4));
        }
    }

    TEST_CASE("linear schedule against time-domain quadrature")
    {
        for (auto [s, r, w0, omega, t] : {std::tuple{0.6, 1.0, -0.5, 0.7, 0.0}, {0.2, 0.9, 0.3, 1.5, 0.4}})
            CHECK(cov_coeff_linear(s, r, {w0, omega}, t) ==
                  doctest::Approx(cov_coeff_time_domain(s, r, {w0, omega}, t)).epsilon(1e-7));
    }

    TEST_CASE("the reference point of the joint schedule diagram")
    {
        CHECK(mean_coeff_linear(0.6, 1.0, {-0.75, 1.0}, 0.0) > 1.0);
        CHECK(cov_coeff_linear(0.6, 1.0, {-0.75, 0.05}, 0.0) > 1.0);
    }

    TEST_CASE("guided moments")
    {
        auto const model = JointGaussianModel::random(9, 3);
        auto const plain = guided_moments(model, GuidanceSchedule::constant(0.0), 0.7);
        CHECK((plain.mean - model.mu()).norm() <= 1e-12 * model.mu().norm());
        for (int i = 0; i < 9; ++i)
            CHECK(plain.cov_eigenvalues[i] == doctest::Approx(model.s()[i] + 0.7).epsilon(1e-14));

        Eigen::VectorXd const r = Eigen::VectorXd::LinSpaced(4, 0.5, 1.2);
        JointGaussianModel const equal(Eigen::MatrixXd::Identity(4, 4), r, r, Eigen::VectorXd::Ones(4));
        auto const doubled = guided_moments(equal, GuidanceSchedule::constant(1.0), 0.0);
        CHECK((doubled.mean - 2.0 * equal.mu()).norm() <= 1e-12);
        CHECK((doubled.cov_eigenvalues - r).norm() <= 1e-12);

        double prev_mean = 0.0;
        double prev_frob = 1e300;
        for (double w : {0.0, 1.0, 2.0})
        {
            auto const m = guided_moments(model, GuidanceSchedule::constant(w), 0.0);
            double const ratio = m.mean.norm() / model.mu().norm();
            double const frob = m.cov_eigenvalues.norm() / model.s().norm();
            CHECK(ratio > prev_mean);
            CHECK(frob < prev_frob);
            prev_mean = ratio;
            prev_frob = frob;
        }
    }

    TEST_CASE("random model invariants")
    {
        auto const m = JointGaussianModel::random(6, 11);
        Eigen::MatrixXd const vtv = m.basis().transpose() * m.basis();
        CHECK((vtv - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-12);
        for (int i = 0; i < 6; ++i)
        {
            CHECK(m.r()[i] > 0.5);
            CHECK(m.r()[i] <= 1.5);
            CHECK(m.s()[i] / m.r()[i] > 0.3);
            CHECK(m.s()[i] <= m.r()[i]);
            if (i > 0)
                CHECK(m.r()[i] <= m.r()[i - 1]);
        }
        auto const again = JointGaussianModel::random(6, 11);
        CHECK(again.basis() == m.basis());
        CHECK(again.mu() == m.mu());
        CHECK_THROWS_AS(JointGaussianModel(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1),
                                           Eigen::Vector2d(1.5, 0.5), Eigen::Vector2d(0, 0)),
                        DomainError);
    }

    TEST_CASE("exact scores")
    {
        auto const model = JointGaussianModel::random(4, 5);
        auto const at_mean = exact_scores(model, model.mu(), 0.3);
        CHECK(at_mean.conditional.norm() < 1e-14);
        auto const at_zero = exact_scores(model, Eigen::VectorXd::Zero(4), 0.3);
        CHECK(at_zero.unconditional.norm() < 1e-14);

        Eigen::VectorXd const x = Eigen::Vector4d(0.3, -1.2, 0.8, 2.0);
        double const t = 0.4;
        auto const sc = exact_scores(model, x, t);
        std::vector<double> xv(x.data(), x.data() + 4);
        auto const to_vec = [](std::span<const double> v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), 4).eval(); };
        auto const gc = app::fd_gradient([&](std::span<const double> v) { return log_density_conditional(model, to_vec(v), t); }, xv, 1e-4);
        auto const gu = app::fd_gradient([&](std::span<const double> v) { return log_density_unconditional(model, to_vec(v), t); }, xv, 1e-4);
        for (int j = 0; j < 4; ++j)
        {
            CHECK(sc.conditional[j] == doctest::Approx(gc[j]).epsilon(1e-5).scale(sc.conditional.norm()));
            CHECK(sc.unconditional[j] == doctest::Approx(gu[j]).epsilon(1e-5).scale(sc.unconditional.norm()));
        }
    }

    TEST_CASE("expansion and contraction")
    {
        for (int i = 0; i < 2000; ++i)
        {
            double const r = 0.01 + 0.05 * (i % 37);
            double const s = r * (0.01 + 0.99 * ((i * 7) % 101) / 100.0);
            double const w = 10.0 * ((i * 13) % 97) / 96.0;
            double const t = 10.0 * ((i * 3) % 89) / 88.0;
            CHECK(mean_coeff(s, r, w, t) >= 1.0 - 1e-12);
            CHECK(cov_coeff(s, r, w, t) <= 1.0 + 1e-12);
        }
    }
}
