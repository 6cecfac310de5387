// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "cfgdist/schedule.hpp"

#include <cmath>
#include <sstream>

#include "cfgdist/error.hpp"

namespace cfgdist
{
GuidanceSchedule GuidanceSchedule::constant(double w)
{
    detail::require(std::isfinite(w) && w > -0.5,
                    "constant guidance requires w > -1/2");
    return GuidanceSchedule(ConstantGuidance{w});
}

GuidanceSchedule GuidanceSchedule::linear(double w0, double omega)
{
    detail::require(std::isfinite(w0) && w0 >= -1.0,
                    "linear guidance requires w0 >= -1");
    detail::require(std::isfinite(omega) && omega >= 0.0,
                    "linear guidance requires omega >= 0");
    return GuidanceSchedule(LinearGuidance{w0, omega});
}

double GuidanceSchedule::at(double t) const
{
    if (auto const* c = std::get_if<ConstantGuidance>(&form_))
        return c->w;
    auto const& l = std::get<LinearGuidance>(form_);
    return l.w0 + l.omega * t;
}

std::string GuidanceSchedule::describe() const
{
    std::ostringstream os;
    os.precision(17);
    if (auto const* c = std::get_if<ConstantGuidance>(&form_))
    {
        os << "constant(w=" << c->w << ")";
    }
    else
    {
        auto const& l = std::get<LinearGuidance>(form_);
        os << "linear(w0=" << l.w0 << ",omega=" << l.omega << ")";
    }
    return os.str();
}
}  // namespace cfgdist
