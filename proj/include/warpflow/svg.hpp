#pragma once

#include <string>
#include <vector>

namespace warpflow {

struct Series {
    std::string label;
    std::vector<double> x, y;  // non-finite points break the line
};

// Standalone SVG line chart with axes, ticks and a legend.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::vector<Series>& series);

}  // namespace warpflow
