// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file commands.hpp
//! Command-line front end.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cfgdist::app
{
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitValidation = 3;

//! Arguments exclude the program name.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);
}  // namespace cfgdist::app
