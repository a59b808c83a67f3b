#include "oslr/simulation.hpp"

#include "oslr/errors.hpp"
#include "oslr/fitting.hpp"
#include "oslr/normal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace oslr {

std::size_t Scenario::n_a() const
{
    return static_cast<std::size_t>(std::llround(static_cast<double>(n_b) / pi));
}

double Scenario::weibull_scale() const
{
    return std::pow(std::numbers::ln2, -1.0 / kappa);
}

void Scenario::validate() const
{
    if (!(accrual_years >= 0.0) || !(followup_years >= 0.0) || !(horizon() > 0.0) || !std::isfinite(horizon()))
        throw DomainError("accrual and follow-up must be non-negative with a positive total");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
    if (n_b < 1) throw DomainError("n_b must be at least 1");
    if (!(pi > 0.0) || !std::isfinite(pi)) throw DomainError("pi must be positive");
    if (n_a() < 1) throw DomainError("n_a = round(n_b / pi) must be at least 1");
    if (replicates < 1) throw DomainError("replicates must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

std::string_view procedure_id(Procedure p)
{
    switch (p) {
    case Procedure::oslr_true: return "oslr";
    case Procedure::oslr_true_wu: return "oslr_wu";
    case Procedure::uncorrected: return "uncorrected_oslr";
    case Procedure::uncorrected_wu: return "uncorrected_oslr_wu";
    case Procedure::corrected: return "corrected_oslr";
    case Procedure::corrected_wu: return "corrected_oslr_wu";
    case Procedure::tslr: return "tslr";
    }
    return "unknown";
}

std::string_view procedure_label(Procedure p)
{
    switch (p) {
    case Procedure::oslr_true: return "OSLR";
    case Procedure::oslr_true_wu: return "OSLR (Wu)";
    case Procedure::uncorrected: return "Uncorrected OSLR";
    case Procedure::uncorrected_wu: return "Uncorrected OSLR (Wu)";
    case Procedure::corrected: return "Corrected OSLR";
    case Procedure::corrected_wu: return "Corrected OSLR (Wu)";
    case Procedure::tslr: return "TSLR";
    }
    return "unknown";
}

Cohort generate_cohort(const Scenario& scenario, Group group, ReplicateStream& stream)
{
    const std::size_t n = group == Group::A ? scenario.n_a() : scenario.n_b;
    const double scale = scenario.weibull_scale();
    const double inv_shape = 1.0 / scenario.kappa;
    std::vector<Observation> obs;
    obs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double event_time = scale * std::pow(-std::log(stream.uniform()), inv_shape);
        const double censor_time = scenario.followup_years + scenario.accrual_years * stream.uniform();
        obs.push_back({std::min(event_time, censor_time), event_time <= censor_time});
    }
    return Cohort(std::move(obs), group == Group::A ? "A" : "B");
}

namespace {

void record(ProcedureOutcome& out, const TestReport& report, double alpha)
{
    out.ok = true;
    out.z = report.z;
    out.reject_two_sided = report.rejects_two_sided(alpha);
    out.reject_one_sided = report.rejects_one_sided(alpha / 2.0);
}

template <class F>
void try_record(ProcedureOutcome& out, double alpha, F&& compute)
{
    try {
        record(out, compute(), alpha);
    } catch (const Error&) {
        out = ProcedureOutcome{};
    }
}

}  // namespace

ReplicateOutcome evaluate_procedures(const Scenario& scenario, const Cohort& cohort_a, const Cohort& cohort_b)
{
    ReplicateOutcome out{};
    const double t = scenario.horizon();
    const double alpha = scenario.alpha;
    auto at = [&](Procedure p) -> ProcedureOutcome& { return out[static_cast<std::size_t>(p)]; };

    const auto truth = ReferenceCurve::fixed(kWeibull, ParameterVector{scenario.kappa, scenario.weibull_scale()});
    try_record(at(Procedure::oslr_true), alpha, [&] { return oslr_test(truth, cohort_b, t, 0.0, false); });
    try_record(at(Procedure::oslr_true_wu), alpha, [&] { return oslr_test(truth, cohort_b, t, 0.5, false); });

    try {
        const FitResult fit = fit_mle(kWeibull, cohort_a);
        const auto ref = ReferenceCurve::fitted(fit);
        try_record(at(Procedure::uncorrected), alpha, [&] { return oslr_test(ref, cohort_b, t, 0.0, false); });
        try_record(at(Procedure::uncorrected_wu), alpha, [&] { return oslr_test(ref, cohort_b, t, 0.5, false); });
        try_record(at(Procedure::corrected), alpha, [&] { return oslr_test(ref, cohort_b, t, 0.0, true); });
        try_record(at(Procedure::corrected_wu), alpha, [&] { return oslr_test(ref, cohort_b, t, 0.5, true); });
    } catch (const Error&) {
        // fit-dependent procedures stay marked as failed
    }

    try_record(at(Procedure::tslr), alpha, [&] { return two_sample_logrank(cohort_a, cohort_b); });
    return out;
}

ReplicateOutcome run_replicate(const Scenario& scenario, ReplicateStream& stream)
{
    const Cohort a = generate_cohort(scenario, Group::A, stream);
    const Cohort b = generate_cohort(scenario, Group::B, stream);
    return evaluate_procedures(scenario, a, b);
}

SimulationResult run_scenario(const Scenario& scenario, unsigned workers)
{
    scenario.validate();
    const std::size_t total = scenario.replicates;
    std::vector<ReplicateOutcome> outcomes(total);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        constexpr std::size_t chunk = 16;
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= total) break;
            const std::size_t end = std::min(total, begin + chunk);
            for (std::size_t r = begin; r < end; ++r) {
                ReplicateStream stream(scenario.seed, r);
                outcomes[r] = run_replicate(scenario, stream);
            }
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(total, 1024))));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    }

    SimulationResult result;
    result.scenario = scenario;
    for (const auto& outcome : outcomes) {
        for (std::size_t p = 0; p < kProcedureCount; ++p) {
            auto& s = result.procedures[p];
            if (!outcome[p].ok) {
                ++s.failed;
                continue;
            }
            ++s.n_eff;
            s.two_sided_rejections += outcome[p].reject_two_sided ? 1 : 0;
            s.one_sided_rejections += outcome[p].reject_one_sided ? 1 : 0;
        }
    }
    for (auto& s : result.procedures) {
        if (s.n_eff > 0) {
            s.two_sided_rate = static_cast<double>(s.two_sided_rejections) / static_cast<double>(s.n_eff);
            s.one_sided_rate = static_cast<double>(s.one_sided_rejections) / static_cast<double>(s.n_eff);
        }
    }
    return result;
}

std::pair<double, double> mc_error_interval(double p, std::size_t n, double level)
{
    if (!(p > 0.0 && p < 1.0)) throw DomainError("nominal rate must lie in (0, 1)");
    if (n < 1) throw DomainError("replicate count must be at least 1");
    if (!(level >= 0.0 && level < 1.0)) throw DomainError("confidence level must lie in [0, 1)");
    const double z = level == 0.0 ? 0.0 : normal_quantile(1.0 - (1.0 - level) / 2.0);
    const double half = z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

std::vector<Scenario> ScenarioGrid::expand() const
{
    const std::vector<double> ks = kappa.empty() ? std::vector<double>{base.kappa} : kappa;
    const std::vector<std::size_t> ns = n_b.empty() ? std::vector<std::size_t>{base.n_b} : n_b;
    const std::vector<double> ps = pi.empty() ? std::vector<double>{base.pi} : pi;
    std::vector<Scenario> cells;
    for (double k : ks) {
        for (std::size_t n : ns) {
            for (double p : ps) {
                Scenario s = base;
                s.kappa = k;
                s.n_b = n;
                s.pi = p;
                s.validate();
                cells.push_back(s);
            }
        }
    }
    return cells;
}

unsigned default_workers()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("OSLR_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

}  // namespace oslr
