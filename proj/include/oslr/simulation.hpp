#pragma once

#include "oslr/oslr_test.hpp"
#include "oslr/rng.hpp"
#include "oslr/survival_data.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace oslr {

/// One cell of the type-I-error study. Both groups share the Weibull
/// distribution with Lambda(s) = ln(2) s^kappa and uniform censoring on
/// [followup, accrual + followup].
struct Scenario {
    double accrual_years = 2.0;
    double followup_years = 3.0;
    double kappa = 1.0;
    std::size_t n_b = 50;
    double pi = 1.0;
    std::size_t replicates = 10000;
    std::uint64_t seed = 20240101;
    double alpha = 0.05;  ///< two-sided level; one-sided tests use alpha / 2

    std::size_t n_a() const;
    double horizon() const { return accrual_years + followup_years; }
    /// Weibull scale giving S(1) = 0.5 for the scenario's shape.
    double weibull_scale() const;
    /// Throws DomainError when the scenario violates an invariant.
    void validate() const;
};

/// The seven procedures compared in the study.
enum class Procedure : int {
    oslr_true = 0,        ///< true reference, w = 0
    oslr_true_wu,         ///< true reference, w = 0.5
    uncorrected,          ///< fitted Weibull reference, w = 0
    uncorrected_wu,       ///< fitted Weibull reference, w = 0.5
    corrected,            ///< fitted reference with V2, w = 0
    corrected_wu,         ///< fitted reference with V2, w = 0.5
    tslr,                 ///< two-sample log-rank
};
inline constexpr std::size_t kProcedureCount = 7;

std::string_view procedure_id(Procedure p);
std::string_view procedure_label(Procedure p);
constexpr std::array<Procedure, kProcedureCount> all_procedures()
{
    return {Procedure::oslr_true, Procedure::oslr_true_wu, Procedure::uncorrected, Procedure::uncorrected_wu,
            Procedure::corrected, Procedure::corrected_wu, Procedure::tslr};
}

struct ProcedureOutcome {
    bool ok = false;
    bool reject_two_sided = false;
    bool reject_one_sided = false;
    double z = 0.0;
};

using ReplicateOutcome = std::array<ProcedureOutcome, kProcedureCount>;

enum class Group { A, B };

/// Draws one cohort of the scenario's design (n_a() or n_b observations).
Cohort generate_cohort(const Scenario& scenario, Group group, ReplicateStream& stream);

/// Runs all procedures on given cohorts. Failures are reported per procedure.
ReplicateOutcome evaluate_procedures(const Scenario& scenario, const Cohort& cohort_a, const Cohort& cohort_b);

/// Generates group A, then group B, from the stream and evaluates them.
ReplicateOutcome run_replicate(const Scenario& scenario, ReplicateStream& stream);

struct ProcedureSummary {
    std::size_t two_sided_rejections = 0;
    std::size_t one_sided_rejections = 0;
    std::size_t n_eff = 0;   ///< replicates where the procedure could be evaluated
    std::size_t failed = 0;
    double two_sided_rate = 0.0;
    double one_sided_rate = 0.0;
};

struct SimulationResult {
    Scenario scenario;
    std::array<ProcedureSummary, kProcedureCount> procedures;

    const ProcedureSummary& operator[](Procedure p) const { return procedures[static_cast<std::size_t>(p)]; }
};

/// Runs every replicate; the result does not depend on `workers`.
SimulationResult run_scenario(const Scenario& scenario, unsigned workers = 1);

/// p -/+ z_level sqrt(p (1 - p) / n), clipped to [0, 1].
std::pair<double, double> mc_error_interval(double p, std::size_t n, double level = 0.95);

/// Scenario file contents: the base scenario and the grid axes.
struct ScenarioGrid {
    Scenario base;
    std::vector<double> kappa;
    std::vector<std::size_t> n_b;
    std::vector<double> pi;

    /// Cartesian product in kappa, n_b, pi order.
    std::vector<Scenario> expand() const;
};

/// Worker count from OSLR_THREADS, capped by the hardware concurrency.
unsigned default_workers();

}  // namespace oslr
