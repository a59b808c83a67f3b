#include "oslr/svg.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace oslr {

std::vector<std::pair<double, double>> step_points(const StepCurve& curve)
{
    std::vector<std::pair<double, double>> pts{{0.0, curve.initial_value}};
    double level = curve.initial_value;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        pts.emplace_back(curve.times[i], level);
        level = curve.values[i];
        pts.emplace_back(curve.times[i], level);
    }
    return pts;
}

void write_svg(std::ostream& out, const std::vector<SvgSeries>& series, const std::string& x_label,
               const std::string& y_label)
{
    constexpr double width = 640, height = 400, left = 60, right = 20, top = 20, bottom = 50;
    double x_max = 0.0, y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!(x_max > 0.0)) x_max = 1.0;
    y_min = std::min(y_min, 0.0);
    if (!(y_max > y_min)) y_max = y_min + 1.0;

    auto px = [&](double x) { return left + (width - left - right) * x / x_max; };
    auto py = [&](double y) { return height - bottom - (height - top - bottom) * (y - y_min) / (y_max - y_min); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << py(y_min) << "\" x2=\"" << width - right << "\" y2=\"" << py(y_min)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << py(y_min)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (width / 2) << "\" y=\"" << (height - 10) << "\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
    out << "<text x=\"15\" y=\"" << (height / 2) << "\" transform=\"rotate(-90 15 " << (height / 2)
        << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = x_max * i / 4.0, y = y_min + (y_max - y_min) * i / 4.0;
        out << "<text x=\"" << px(x) << "\" y=\"" << (height - bottom + 16) << "\" font-size=\"11\" text-anchor=\"middle\">"
            << x << "</text>\n";
        out << "<text x=\"" << (left - 6) << "\" y=\"" << py(y) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << y
            << "</text>\n";
    }
    double legend_y = top + 10;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.points) out << px(x) << ',' << py(y) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << (width - right - 150) << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\""
            << s.color << "\">" << s.name << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

}  // namespace oslr
