// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cfgdist/error.hpp"
#include "cfgdist/special_math.hpp"
#include "oracles.hpp"

using namespace cfgdist;

TEST_SUITE("special_math")
{
    TEST_CASE("incomplete beta on polynomial integrands")
    {
        CHECK(incomplete_beta_definite({1, 1, 0, 0.5}) == doctest::Approx(0.5).epsilon(1e-12));
        for (double f : {0.1, 0.37, 0.9})
            CHECK(incomplete_beta_definite({1, 1, 0, f}) == doctest::Approx(f).epsilon(1e-12));
        CHECK(incomplete_beta_definite({2, 3, 0.2, 0.8}) == doctest::Approx(0.066).epsilon(1e-12));
        CHECK(app::beta_polynomial_oracle(2, 3, 0.2, 0.8) == doctest::Approx(0.066).epsilon(1e-14));
    }

    TEST_CASE("incomplete beta matches boost for positive exponents")
    {
        for (double a : {0.3, 1.0, 2.5, 7.0})
            for (double b : {0.2, 0.5, 1.0, 3.5})
                for (auto [f1, f2] : {std::pair{0.0, 0.3}, {0.1, 0.9}, {0.5, 1.0}, {0.0, 1.0}})
                {
                    CAPTURE(a);
                    CAPTURE(b);
                    CAPTURE(f1);
                    CAPTURE(f2);
                    double const ref = boost::math::beta(a, b, f2) - boost::math::beta(a, b, f1);
                    double const got = incomplete_beta_definite({a, b, f1, f2}, {1e-14, 1e-12, 4000});
                    CHECK(got == doctest::Approx(ref).epsilon(1e-9));
                }
    }

    TEST_CASE("complete beta equals the gamma product")
    {
        for (int a = 1; a <= 4; ++a)
            for (int b = 1; b <= 4; ++b)
            {
                double const ref = std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
                CHECK(incomplete_beta_definite({double(a), double(b), 0, 1}) ==
                      doctest::Approx(ref).epsilon(1e-8));
            }
    }

    TEST_CASE("incomplete beta is additive over adjacent intervals")
    {
        QuadratureSettings const q{1e-12, 1e-10, 4000};
        for (double a : {-1.5, -0.3, 0.0, 0.4, 2.0})
            for (double b : {0.3, 1.0, 2.7})
            {
                double const f1 = 0.15;
                double const f2 = 0.55;
                double const f3 = 0.95;
                double const whole = incomplete_beta_definite({a, b, f1, f3}, q);
                double const parts = incomplete_beta_definite({a, b, f1, f2}, q) +
                                     incomplete_beta_definite({a, b, f2, f3}, q);
                CHECK(std::abs(whole - parts) <= 2 * std::max(q.abs_tol, q.rel_tol * std::abs(whole)));
            }
    }

    TEST_CASE("non-positive first exponent against tanh-sinh quadrature")
    {
        for (double a : {-2.0, -0.5, 0.0})
            for (double b : {0.25, 1.0, 3.0})
            {
                double const ref = app::beta_quadrature_oracle(a, b, 0.2, 1.0);
                CHECK(incomplete_beta_definite({a, b, 0.2, 1.0}, {1e-14, 1e-12, 4000}) ==
                      doctest::Approx(ref).epsilon(1e-9));
            }
        CHECK(app::beta_polynomial_oracle(-2.0, 3, 0.2, 0.7) ==
              doctest::Approx(app::beta_quadrature_oracle(-2.0, 3.0, 0.2, 0.7)).epsilon(1e-12));
    }

    TEST_CASE("incomplete beta rejects invalid arguments")
    {
        CHECK_THROWS_AS(incomplete_beta_definite({-0.5, 1, 0, 0.5}), DomainError);
        CHECK_THROWS_AS(incomplete_beta_definite({1, 1, 0.6, 0.5}), DomainError);
        CHECK_THROWS_AS(incomplete_beta_definite({1, 1, 0, 1.5}), DomainError);
        CHECK_THROWS_AS(incomplete_beta_definite({1, -1, 0, 1.0}), DomainError);
        CHECK(incomplete_beta_definite({1, -1, 0, 0.5}) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK_THROWS_AS(incomplete_beta_definite({1, 1, 0, 0.5}, {-1, 1e-8, 10}), DomainError);
    }

    TEST_CASE("adaptive quadrature")
    {
        CHECK(adaptive_quad([](double x) { return x; }, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(adaptive_quad([](double x) { return std::sin(x); }, 0, std::numbers::pi) ==
              doctest::Approx(2.0).epsilon(1e-10));
        CHECK(adaptive_quad_to_infinity([](double t) { return 1.0 / (t * t); }, 1.0) ==
              doctest::Approx(1.0).epsilon(1e-8));
        // Integrable endpoint singularity.
        CHECK(adaptive_quad([](double x) { return 1.0 / std::sqrt(x); }, 0, 1, {1e-10, 1e-10, 4000}) ==
              doctest::Approx(2.0).epsilon(1e-7));
    }

    TEST_CASE("bisection")
    {
        CHECK(bisection_root([](double x) { return x - 1; }, 0, 2, 1e-12) == doctest::Approx(1.0).epsilon(1e-11));
        CHECK(bisection_root([](double x) { return x * x - 2; }, 0, 2, 1e-12) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
        CHECK_THROWS_AS(bisection_root([](double x) { return x * x + 1; }, 0, 2, 1e-12), BracketError);
    }

    TEST_CASE("log-sum-exp")
    {
        std::vector<double> two{0, 0};
        CHECK(log_sum_exp(two) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
        std::vector<double> one{-3.25};
        CHECK(log_sum_exp(one) == -3.25);
        std::vector<double> big{1000, 1000};
        CHECK(log_sum_exp(big) == doctest::Approx(1000 + std::log(2.0)).epsilon(1e-15));
        double const ninf = -std::numeric_limits<double>::infinity();
        std::vector<double> none{ninf, ninf};
        CHECK(log_sum_exp(none) == ninf);

        std::vector<double> v{-1.5, 0.25, 3.0, -40.0};
        double const base = log_sum_exp(v);
        for (double c : {-500.0, 7.0, 600.0})
        {
            std::vector<double> shifted = v;
            for (double& x : shifted)
                x += c;
            CHECK(std::abs(log_sum_exp(shifted) - c - base) <= 4 * std::numeric_limits<double>::epsilon() * (std::abs(c) + 1));
        }
    }

    TEST_CASE("powm1 ratio")
    {
        CHECK(powm1_ratio(2.5, 0.0) == 2.5);
        for (double x : {-0.9, -1e-9, 1e-9, 0.3, 4.0})
            CHECK(powm1_ratio(-1.7, x) == doctest::Approx(std::expm1(-1.7 * std::log1p(x)) / x).epsilon(1e-12));
    }
}
