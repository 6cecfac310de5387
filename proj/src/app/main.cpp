// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv)
{
    return cfgdist::app::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
