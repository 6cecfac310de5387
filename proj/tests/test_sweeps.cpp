// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>

#include "cfgdist/error.hpp"
#include "cfgdist/joint_gaussian.hpp"
#include "cfgdist/mixture_rem.hpp"
#include "cfgdist/sweeps.hpp"

using namespace cfgdist;

namespace
{
GridSpec grid(Axis a, Axis b) { return {std::move(a), std::move(b), {}}; }

SweepRow const& cell(std::vector<SweepRow> const& rows, double x1, double x2)
{
    for (auto const& r : rows)
        if (std::abs(r.x1 - x1) < 1e-12 && std::abs(r.x2 - x2) < 1e-12)
            return r;
    throw std::runtime_error("cell not found");
}
}  // namespace

TEST_SUITE("sweeps")
{
    TEST_CASE("axes")
    {
        Axis const lin{"w", 0, 1, 5, AxisScale::linear, false};
        auto const v = lin.values();
        REQUIRE(v.size() == 5);
        CHECK(v.front() == 0.0);
        CHECK(v.back() == 1.0);
        Axis const lg{"beta", 0.01, 1, 3, AxisScale::log, false};
        CHECK(lg.values()[1] == doctest::Approx(0.1).epsilon(1e-14));
        Axis const open{"omega", 0, 5, 5, AxisScale::linear, true};
        CHECK(open.values().front() > 0.0);
        CHECK(open.values().back() == 5.0);
        CHECK_THROWS_AS((Axis{"x", 0, 1, 1, AxisScale::linear, false}.validate()), DomainError);
        CHECK_THROWS_AS((Axis{"x", 0, 1, 3, AxisScale::log, false}.validate()), DomainError);
    }

    TEST_CASE("classification")
    {
        CHECK(classify(0.0, 0.0) == Region::no_distortion);
        CHECK(classify(1e-7, -1e-7) == Region::no_distortion);
        CHECK(classify(0.2, -0.1) == Region::variance_shrink);
        CHECK(classify(0.2, 0.1) == Region::separability_and_diversity);
        CHECK(classify(-0.2, 0.1) == Region::mean_collapse);
    }

    TEST_CASE("beta-w sweep")
    {
        auto const rows = sweep_beta_w(0.5, grid({"beta", 0.01, 1, 12, AxisScale::log, false},
                                                 {"w", 0, 1, 6, AxisScale::linear, false}));
        CHECK(rows.size() == 72);
        CHECK(rows[0].x1 == 0.01);
        CHECK(rows[1].x2 == doctest::Approx(0.2));
        bool white = false;
        for (auto const& r : rows)
        {
            CHECK(r.error.empty());
            if (r.x2 == 0.0)
            {
                CHECK(std::abs(*r.delta_mu) < 1e-9);
                CHECK(std::abs(*r.delta_sigma2) < 1e-9);
            }
            if (r.x1 == 1.0 && r.x2 == 1.0)
            {
                white = !r.t_speciation.has_value();
                CHECK(*r.delta_mu > 0.3);
            }
            if (r.x1 == 0.01 && r.x2 > 0)
                CHECK(std::abs(*r.delta_mu) < 0.01);
        }
        CHECK(white);

        auto const spot = sweep_beta_w(0.5, grid({"beta", 0.1, 0.2, 2, AxisScale::linear, false},
                                                 {"w", 0.5, 1, 2, AxisScale::linear, false}));
        auto const direct = assemble_trajectory({0.5, 0.1, GuidanceSchedule::constant(0.5), {}}, {}).second;
        auto const& c = cell(spot, 0.1, 0.5);
        CHECK(*c.delta_mu == direct.delta_mu);
        CHECK(*c.delta_sigma2 == direct.delta_sigma2);
        CHECK(c.t_speciation == direct.t_speciation);
    }

    TEST_CASE("sigma-w sweep")
    {
        auto const rows = sweep_sigma_w(0.1, grid({"sigma2", 0.2, 1.0, 5, AxisScale::linear, false},
                                                  {"w", 0, 2, 5, AxisScale::linear, false}));
        for (double s2 : {0.2, 0.6, 1.0})
        {
            double prev = 0;
            for (double w : {0.0, 0.5, 1.0, 1.5, 2.0})
            {
                auto const& c = cell(rows, s2, w);
                REQUIRE(c.t_speciation.has_value());
                CHECK(*c.t_speciation > prev);
                prev = *c.t_speciation;
                if (w == 0.0)
                    CHECK(c.region == Region::no_distortion);
            }
        }
        auto const& spot = cell(rows, 0.6, 1.5);
        auto const direct = assemble_trajectory({0.6, 0.1, GuidanceSchedule::constant(1.5), {}}, {}).second;
        CHECK(*spot.delta_mu == direct.delta_mu);
    }

    TEST_CASE("sigma-beta sweep")
    {
        auto const rows = sweep_sigma_beta(1.0, grid({"sigma2", 0.2, 1.0, 3, AxisScale::linear, false},
                                                     {"beta", 0.01, 1, 3, AxisScale::log, false}));
        CHECK(rows.size() == 9);
        auto const direct = assemble_trajectory({0.6, 0.1, GuidanceSchedule::constant(1.0), {}}, {}).second;
        CHECK(*cell(rows, 0.6, 0.1).delta_mu == direct.delta_mu);
        CHECK_THROWS_AS(sweep_sigma_beta(-0.7, grid({"sigma2", 0.2, 1.0, 2, AxisScale::linear, false},
                                                    {"beta", 0.1, 1, 2, AxisScale::linear, false})),
                        DomainError);
    }

    TEST_CASE("schedule phase diagram")
    {
        auto const rows = sweep_schedule_phase_diagram(
            0.75, grid({"w0", -1, 1, 9, AxisScale::linear, false}, {"omega", 0, 5, 10, AxisScale::linear, true}));
        for (auto const& r : rows)
        {
            if (r.region == Region::separability_and_diversity)
                CHECK(r.x1 < 0);
            if (r.x1 > 0 && r.x2 >= 2.5)
                CHECK(r.region == Region::variance_shrink);
        }
        auto const sanity = sweep_schedule_phase_diagram(
            0.25, grid({"w0", -0.75, 0.0, 2, AxisScale::linear, false}, {"omega", 1, 2, 2, AxisScale::linear, false}));
        auto const& c = cell(sanity, -0.75, 1.0);
        CHECK(*c.delta_mu == doctest::Approx(0.25).epsilon(1e-6));
        CHECK(c.region == Region::separability_and_diversity);
    }

    TEST_CASE("joint-Gaussian schedule diagram")
    {
        auto const rows = sweep_joint_gaussian_schedule(
            1.0, 0.6, grid({"w0", -1, 1, 9, AxisScale::linear, false}, {"omega", 0, 5, 10, AxisScale::linear, true}));
        bool beneficial = false;
        for (auto const& r : rows)
            if (r.region == Region::separability_and_diversity)
            {
                beneficial = true;
                CHECK(r.x1 < 0);
            }
        CHECK(beneficial);
        auto const flat = sweep_joint_gaussian_schedule(
            1.0, 0.6, grid({"w0", 0.5, 2, 4, AxisScale::linear, false}, {"omega", 0, 0.1, 2, AxisScale::linear, false}));
        for (auto const& r : flat)
            if (r.x2 == 0.0)
            {
                CHECK(*r.mean_coeff > 1.0);
                CHECK(*r.variance_coeff < 1.0);
            }
    }

    TEST_CASE("refinement stability and purity")
    {
        auto const g1 = grid({"beta", 0.01, 1, 5, AxisScale::log, false}, {"w", 0, 1, 5, AxisScale::linear, false});
        auto const g2 = grid({"beta", 0.01, 1, 9, AxisScale::log, false}, {"w", 0, 1, 9, AxisScale::linear, false});
        auto const coarse = sweep_beta_w(0.5, g1);
        auto const fine = sweep_beta_w(0.5, g2);
        for (auto const& c : coarse)
        {
            if (std::abs(*c.delta_mu) < 1e-5 || std::abs(*c.delta_sigma2) < 1e-5)
                continue;
            for (auto const& f : fine)
                if (std::abs(f.x1 - c.x1) < 1e-12 * c.x1 && f.x2 == c.x2)
                    CHECK(f.region == c.region);
        }
        SweepOptions one;
        one.workers = 1;
        auto const again = sweep_beta_w(0.5, g1, one);
        REQUIRE(again.size() == coarse.size());
        for (std::size_t i = 0; i < again.size(); ++i)
        {
            CHECK(again[i].delta_mu == coarse[i].delta_mu);
            CHECK(again[i].t_speciation == coarse[i].t_speciation);
        }
    }
}
