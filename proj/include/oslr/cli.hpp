#pragma once

#include "oslr/oslr_test.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace oslr::cli {

/// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,       ///< bad flags or configuration
    kFitFailure = 2,  ///< input data could not be read or fitted
    kDegenerate = 3,  ///< test statistic with zero variance
};

/// Parses `family:p1[,p2]`, e.g. `exponential:1.0` or `weibull:1.5,2`.
ReferenceCurve parse_fixed_reference(const std::string& spec);

/// One row of the test table.
struct MethodRow {
    std::string method;
    TestReport report;
};

/// Fixed-width table with columns method, M_OSLR, V1, V2, Z, p (one-sided), 4 decimals.
void write_test_table(std::ostream& out, const std::vector<MethodRow>& rows);

/// Runs the command line `args` (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oslr::cli
