// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file acceptance.hpp
//! The acceptance suite: nine criteria with pinned tolerances.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cfgdist::app
{
struct CriterionResult
{
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double runtime_limit = 0.0;
};

struct AcceptanceOptions
{
    //! Quarter sample counts; fixed tolerance floors widen by sqrt(4) = 2.
    bool quick = false;
    int workers = 0;
    std::uint64_t seed = 20240607;
    //! Criteria whose tolerances are made negative, so they must fail.
    std::set<int> corrupt;
};

inline constexpr int kCriterionCount = 9;

std::string_view criterion_name(int id);
CriterionResult run_criterion(int id, AcceptanceOptions const& opt);

//! "PASS [3] name (12.3 s / 180 s): detail"
std::string format_result(CriterionResult const& r);
}  // namespace cfgdist::app
