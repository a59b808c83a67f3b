#include "oslr/nonparametric.hpp"

#include <algorithm>
#include <ostream>

namespace oslr {

namespace {

struct EventTable {
    std::vector<double> times;
    std::vector<std::size_t> deaths;
    std::vector<std::size_t> at_risk;
};

// Distinct event times with tied events aggregated and Y(t_j) = #{time >= t_j}.
EventTable event_table(const Cohort& cohort)
{
    std::vector<Observation> sorted(cohort.begin(), cohort.end());
    std::sort(sorted.begin(), sorted.end(), [](const Observation& a, const Observation& b) {
        return a.time < b.time;
    });
    EventTable table;
    const std::size_t n = sorted.size();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::size_t d = 0;
        while (j < n && sorted[j].time == sorted[i].time) {
            d += sorted[j].event ? 1 : 0;
            ++j;
        }
        if (d > 0) {
            table.times.push_back(sorted[i].time);
            table.deaths.push_back(d);
            table.at_risk.push_back(n - i);
        }
        i = j;
    }
    return table;
}

}  // namespace

double StepCurve::operator()(double t) const
{
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return initial_value;
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

StepCurve kaplan_meier(const Cohort& cohort)
{
    const auto table = event_table(cohort);
    StepCurve curve;
    curve.initial_value = 1.0;
    double s = 1.0;
    for (std::size_t j = 0; j < table.times.size(); ++j) {
        const auto d = static_cast<double>(table.deaths[j]);
        const auto y = static_cast<double>(table.at_risk[j]);
        s = table.deaths[j] == table.at_risk[j] ? 0.0 : s * (1.0 - d / y);
        curve.times.push_back(table.times[j]);
        curve.values.push_back(s);
    }
    return curve;
}

StepCurve nelson_aalen(const Cohort& cohort)
{
    const auto table = event_table(cohort);
    StepCurve curve;
    curve.initial_value = 0.0;
    double h = 0.0;
    for (std::size_t j = 0; j < table.times.size(); ++j) {
        h += static_cast<double>(table.deaths[j]) / static_cast<double>(table.at_risk[j]);
        curve.times.push_back(table.times[j]);
        curve.values.push_back(h);
    }
    return curve;
}

void write_step_csv(std::ostream& out, const StepCurve& curve)
{
    out << "time,value\n";
    out << "0," << format_double(curve.initial_value) << '\n';
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        out << format_double(curve.times[i]) << ',' << format_double(curve.values[i]) << '\n';
}

}  // namespace oslr
