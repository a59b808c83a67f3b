#pragma once

#include "oslr/nonparametric.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace oslr {

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
    std::string color;
};

/// Corner points of a step curve, suitable for a polyline.
std::vector<std::pair<double, double>> step_points(const StepCurve& curve);

/// Minimal static line chart with axes and a legend.
void write_svg(std::ostream& out, const std::vector<SvgSeries>& series, const std::string& x_label,
               const std::string& y_label);

}  // namespace oslr
