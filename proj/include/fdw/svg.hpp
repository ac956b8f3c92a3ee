#ifndef FDW_SVG_HPP
#define FDW_SVG_HPP

#include <string>
#include <vector>

namespace fdw {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgAxes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = true;
};

/// Standalone line plot; non-positive y values are skipped on a log axis.
std::string line_plot_svg(const std::vector<SvgSeries>& series, const SvgAxes& axes);

}  // namespace fdw

#endif  // FDW_SVG_HPP
