#pragma once

#include "oslr/fitting.hpp"
#include "oslr/oslr_test.hpp"
#include "oslr/simulation.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>

namespace oslr {

using Json = nlohmann::ordered_json;

/// Keys: family, theta_hat, info_matrix (row-major), loglik, aic, n, converged, iterations.
Json to_json(const FitResult& fit);

/// Keys match the TestReport fields; absent optionals are null.
Json to_json(const TestReport& report);

Json to_json(const Scenario& scenario);

/// One record per cell with the per-procedure summaries and MC error bands.
Json to_json(const SimulationResult& result);

/**
 * Parses a scenario file. Keys: accrual_years, followup_years, kappa, n_b,
 * pi, replicates, seed, alpha; kappa, n_b and pi may be lists. Throws
 * DomainError on unknown keys or invalid values.
 */
ScenarioGrid parse_scenario(const Json& doc);

/// Flat rows `kappa,n_b,pi,procedure,sided,rate,lo,hi,n_eff` with the 95% MC
/// band around the nominal level (alpha two-sided, alpha/2 one-sided).
void write_simulation_csv(std::ostream& out, std::span<const SimulationResult> results);

}  // namespace oslr
