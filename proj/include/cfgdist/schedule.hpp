// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>

namespace cfgdist
{
struct ConstantGuidance
{
    double w;
};

//! w(t) = w0 + omega * t
struct LinearGuidance
{
    double w0;
    double omega;
};

//! Guidance level as a function of diffusion time.
class GuidanceSchedule
{
  public:
    using Form = std::variant<ConstantGuidance, LinearGuidance>;

    //! Requires w > -1/2 so the guided variance stays finite as T -> inf.
    static GuidanceSchedule constant(double w);
    //! Requires w0 >= -1 and omega >= 0.
    static GuidanceSchedule linear(double w0, double omega);

    double at(double t) const;
    bool is_constant() const
    {
        return std::holds_alternative<ConstantGuidance>(form_);
    }
    Form const& form() const { return form_; }

    //! "constant(w=...)" / "linear(w0=...,omega=...)"
    std::string describe() const;

  private:
    explicit GuidanceSchedule(Form f) : form_(f) {}

    Form form_;
};
}  // namespace cfgdist
