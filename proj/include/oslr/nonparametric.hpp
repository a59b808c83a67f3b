#pragma once

#include "oslr/survival_data.hpp"

#include <iosfwd>
#include <vector>

namespace oslr {

/// Right-continuous step function: `initial_value` before the first jump,
/// `values[i]` on [times[i], times[i+1]).
struct StepCurve {
    std::vector<double> times;
    std::vector<double> values;
    double initial_value = 0.0;

    double operator()(double t) const;
};

/// Product-limit estimate of the survival function. Jumps at distinct event times.
StepCurve kaplan_meier(const Cohort& cohort);

/// Nelson-Aalen estimate of the cumulative hazard.
StepCurve nelson_aalen(const Cohort& cohort);

/// Plot-ready `time,value` rows, starting with the (0, initial_value) baseline.
void write_step_csv(std::ostream& out, const StepCurve& curve);

}  // namespace oslr
