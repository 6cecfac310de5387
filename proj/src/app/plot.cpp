// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "plot.hpp"

#include <sstream>

namespace cfgdist::app
{
namespace
{
void preamble(std::ostringstream& os, std::string const& png, std::string const& title,
              std::string const& x_label, std::string const& y_label)
{
    os << "# gnuplot script; run: gnuplot " << png.substr(0, png.rfind('.')) << ".gp\n";
    os << "set terminal pngcairo size 800,640\n";
    os << "set output '" << png << "'\n";
    os << "set datafile separator ','\n";
    os << "set title '" << title << "' noenhanced\n";
    os << "set xlabel '" << x_label << "' noenhanced\n";
    os << "set ylabel '" << y_label << "' noenhanced\n";
}
}  // namespace

std::string gnuplot_heatmap(HeatmapSpec const& spec)
{
    std::ostringstream os;
    preamble(os, spec.output_png, spec.title, spec.x_label, spec.y_label);
    os << "set key off\n";
    if (spec.log_x)
        os << "set logscale x\n";
    if (spec.log_y)
        os << "set logscale y\n";
    if (spec.categorical)
    {
        os << "set cbrange [-0.5:3.5]\n";
        os << "set palette maxcolors 4\n";
        os << "set palette defined (0 '#f4a261', 1 '#2a9d8f', 2 '#264653', 3 '#e9ecef')\n";
        os << "set cbtics ('separability_and_diversity' 0, 'mean_collapse' 1, "
              "'variance_shrink' 2, 'no_distortion' 3)\n";
    }
    else
    {
        os << "set palette rgbformulae 33,13,10\n";
    }
    os << "plot '" << spec.csv_file
       << "' every ::1 using 1:2:3 with points pointtype 5 pointsize 1.2 palette\n";
    return os.str();
}

std::string gnuplot_lines(LinesSpec const& spec)
{
    std::ostringstream os;
    preamble(os, spec.output_png, spec.title, spec.x_label, spec.y_label);
    os << "set key outside right noenhanced\n";
    os << "plot";
    for (std::size_t i = 0; i < spec.series.size(); ++i)
    {
        Series const& s = spec.series[i];
        auto col = [&](int c) {
            return s.filter.empty() ? std::to_string(c)
                                    : "(" + s.filter + " ? $" + std::to_string(c) + " : 1/0)";
        };
        os << (i == 0 ? " " : ", \\\n     ") << "'" << spec.csv_file << "' every ::1 using "
           << s.x_column << ":" << col(s.y_column);
        if (s.err_column > 0)
            os << ":" << s.err_column << " with yerrorlines";
        else
            os << " with linespoints";
        os << " title '" << s.title << "'";
    }
    os << "\n";
    return os.str();
}
}  // namespace cfgdist::app
