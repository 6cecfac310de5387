// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace cfgdist::app
{
struct HeatmapSpec
{
    std::string csv_file;  // long form: x,y,value
    std::string output_png;
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    //! Discrete palette for integer region codes.
    bool categorical = false;
};

//! Self-contained gnuplot script rendering the CSV as a heatmap.
std::string gnuplot_heatmap(HeatmapSpec const& spec);

struct Series
{
    int x_column = 1;  // 1-based
    int y_column = 2;
    //! Optional error-bar column, 0 for none.
    int err_column = 0;
    //! gnuplot filter expression on a column, e.g. "$1==20"; empty keeps all.
    std::string filter;
    std::string title;
};

struct LinesSpec
{
    std::string csv_file;
    std::string output_png;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

//! Self-contained gnuplot script drawing one curve per series.
std::string gnuplot_lines(LinesSpec const& spec);
}  // namespace cfgdist::app
