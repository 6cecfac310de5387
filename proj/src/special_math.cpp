// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "cfgdist/special_math.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "cfgdist/error.hpp"

namespace cfgdist
{
namespace
{
// Kronrod abscissae (positive half) and weights; the Gauss 7-point rule uses
// the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(Segment const& other) const { return error < other.error; }
};

Segment gauss_kronrod_15(Integrand const& f, double lo, double hi)
{
    double const center = 0.5 * (lo + hi);
    double const half = 0.5 * (hi - lo);
    double const fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j)
    {
        double const dx = half * kXgk[j];
        double const sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1)
            gauss += kWg[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

std::string describe(char const* what, double lo, double hi)
{
    std::ostringstream os;
    os << what << " on [" << lo << ", " << hi << "]";
    return os.str();
}
}  // namespace

void QuadratureSettings::validate() const
{
    detail::require(abs_tol > 0 && rel_tol > 0,
                    "quadrature tolerances must be strictly positive");
    detail::require(max_subdivisions >= 1,
                    "quadrature needs at least one subdivision");
}

void BetaArgs::validate() const
{
    detail::require(std::isfinite(a) && std::isfinite(b),
                    "Beta exponents must be finite");
    detail::require(0 <= f1 && f1 <= f2 && f2 <= 1,
                    "Beta limits must satisfy 0 <= f1 <= f2 <= 1");
    detail::require(f1 > 0 || a > 0,
                    "Beta integral with f1 = 0 requires a > 0");
    detail::require(f2 < 1 || b > 0,
                    "Beta integral with f2 = 1 requires b > 0");
}

double adaptive_quad(Integrand const& f, double lo, double hi,
                     QuadratureSettings const& q)
{
    q.validate();
    detail::require(lo <= hi, "adaptive_quad requires lo <= hi");
    if (lo == hi)
        return 0.0;

    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod_15(f, lo, hi);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);

    int subdivisions = 0;
    while (total_err > std::max(q.abs_tol, q.rel_tol * std::abs(total)))
    {
        if (!std::isfinite(total))
            throw ConvergenceError(describe("non-finite quadrature", lo, hi));
        if (subdivisions >= q.max_subdivisions)
            throw ConvergenceError(
                describe("quadrature subdivision limit reached", lo, hi));
        Segment worst = heap.top();
        double const mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi)
        {
            // Interval at machine resolution: nothing left to refine.
            break;
        }
        heap.pop();
        Segment left = gauss_kronrod_15(f, worst.lo, mid);
        Segment right = gauss_kronrod_15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    // Re-sum to drop the accumulated update rounding.
    double sum = 0.0;
    while (!heap.empty())
    {
        sum += heap.top().value;
        heap.pop();
    }
    return sum;
}

double adaptive_quad_to_infinity(Integrand const& f, double lo,
                                 QuadratureSettings const& q)
{
    auto mapped = [&f, lo](double x) {
        double const one_minus = 1.0 - x;
        double const t = lo + x / one_minus;
        return f(t) / (one_minus * one_minus);
    };
    return adaptive_quad(mapped, 0.0, 1.0, q);
}

double incomplete_beta_definite(BetaArgs const& args,
                                QuadratureSettings const& q)
{
    args.validate();
    double const a = args.a;
    double const b = args.b;
    if (args.f1 == args.f2)
        return 0.0;

    double const split = std::clamp(0.5, args.f1, args.f2);
    double result = 0.0;

    auto direct = [a, b](double r) {
        return std::exp((a - 1.0) * std::log(r) + (b - 1.0) * std::log1p(-r));
    };

    if (split > args.f1)
    {
        if (args.f1 == 0.0 && a < 1.0)
        {
            // v = r^a, dr r^{a-1} = dv / a
            auto g = [a, b](double v) {
                double const r = std::pow(v, 1.0 / a);
                return std::exp((b - 1.0) * std::log1p(-r));
            };
            result += adaptive_quad(g, 0.0, std::pow(split, a), q) / a;
        }
        else
        {
            result += adaptive_quad(direct, args.f1, split, q);
        }
    }
    if (args.f2 > split)
    {
        if (b < 1.0)
        {
            // v = (1-r)^b, dr (1-r)^{b-1} = -dv / b
            auto g = [a, b](double v) {
                double const r = -std::expm1(std::log(v) / b);
                return std::exp((a - 1.0) * std::log(r));
            };
            double const v_lo = std::pow(1.0 - args.f2, b);
            double const v_hi = std::pow(1.0 - split, b);
            result += adaptive_quad(g, v_lo, v_hi, q) / b;
        }
        else
        {
            result += adaptive_quad(direct, split, args.f2, q);
        }
    }
    return result;
}

double bisection_root(std::function<double(double)> const& g, double lo,
                      double hi, double tol)
{
    detail::require(lo <= hi, "bisection_root requires lo <= hi");
    detail::require(tol > 0, "bisection_root requires tol > 0");
    double g_lo = g(lo);
    double const g_hi = g(hi);
    if (g_lo == 0.0)
        return lo;
    if (g_hi == 0.0)
        return hi;
    if (std::signbit(g_lo) == std::signbit(g_hi))
        throw BracketError(describe("no sign change", lo, hi));

    while (hi - lo > tol)
    {
        double const mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        double const g_mid = g(mid);
        if (g_mid == 0.0)
            return mid;
        if (std::signbit(g_mid) == std::signbit(g_lo))
        {
            lo = mid;
            g_lo = g_mid;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double log_sum_exp(std::span<const double> values)
{
    detail::require(!values.empty(), "log_sum_exp of an empty list");
    double const vmax = *std::max_element(values.begin(), values.end());
    if (std::isinf(vmax))
        return vmax;
    double sum = 0.0;
    for (double v : values)
        sum += std::exp(v - vmax);
    return vmax + std::log(sum);
}

double powm1_ratio(double k, double x)
{
    detail::require(x > -1.0, "powm1_ratio requires x > -1");
    if (x == 0.0)
        return k;
    return std::expm1(k * std::log1p(x)) / x;
}
}  // namespace cfgdist
