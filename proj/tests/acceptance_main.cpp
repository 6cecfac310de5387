// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
// cfgdist_acceptance [--quick] [id...]: one PASS/FAIL line per criterion.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "acceptance.hpp"

int main(int argc, char** argv)
{
    cfgdist::app::AcceptanceOptions opt;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i)
    {
        std::string const arg = argv[i];
        if (arg == "--quick")
            opt.quick = true;
        else
            ids.push_back(std::atoi(arg.c_str()));
    }
    if (ids.empty())
        for (int i = 1; i <= cfgdist::app::kCriterionCount; ++i)
            ids.push_back(i);
    int failed = 0;
    for (int id : ids)
    {
        if (id < 1 || id > cfgdist::app::kCriterionCount)
        {
            std::cerr << "unknown criterion " << id << "\n";
            return 1;
        }
        auto const res = cfgdist::app::run_criterion(id, opt);
        failed += !res.passed;
        std::cout << cfgdist::app::format_result(res) << std::endl;
    }
    return failed == 0 ? 0 : 3;
}
