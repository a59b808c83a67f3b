#include "oslr/oslr_test.hpp"

#include "oslr/errors.hpp"
#include "oslr/linalg.hpp"
#include "oslr/normal.hpp"

#include <algorithm>
#include <cmath>

namespace oslr {

ReferenceCurve ReferenceCurve::fixed(Family family, ParameterVector theta)
{
    check_parameters(family, theta.values());
    ReferenceCurve ref;
    ref.family_ = family;
    ref.theta_ = std::move(theta);
    return ref;
}

ReferenceCurve ReferenceCurve::fixed(std::function<double(double)> cumulative_hazard)
{
    if (!cumulative_hazard) throw UsageError("empty reference function");
    ReferenceCurve ref;
    ref.callable_ = std::move(cumulative_hazard);
    return ref;
}

ReferenceCurve ReferenceCurve::fitted(const FitResult& fit)
{
    const int q = fit.family.q();
    if (fit.info_matrix.rows() != q || fit.info_matrix.cols() != q)
        throw UsageError("information matrix dimension does not match the parameter dimension");
    if (fit.n == 0) throw UsageError("fit carries no sample size");
    ReferenceCurve ref = fixed(fit.family, fit.theta_hat);
    ref.info_ = fit.info_matrix;
    ref.n_control_ = fit.n;
    return ref;
}

double ReferenceCurve::cumulative_hazard(double t) const
{
    if (family_) {
        if (t <= 0.0) return 0.0;
        return cumulative_hazard_derivatives(*family_, theta_.values(), t).value;
    }
    return callable_(t);
}

Vec ReferenceCurve::gradient(double t) const
{
    if (!family_) throw UsageError("gradient requires a parametric reference");
    return cumulative_hazard_derivatives(*family_, theta_.values(), t).gradient;
}

Family ReferenceCurve::family() const
{
    if (!family_) throw UsageError("reference is not parametric");
    return *family_;
}

const ParameterVector& ReferenceCurve::theta() const
{
    if (!family_) throw UsageError("reference is not parametric");
    return theta_;
}

const Mat& ReferenceCurve::info_matrix() const
{
    if (!info_) throw UsageError("reference has no information matrix (not a fitted reference)");
    return *info_;
}

bool TestReport::rejects_two_sided(double alpha) const
{
    return std::abs(z) >= normal_quantile(1.0 - alpha / 2.0);
}

bool TestReport::rejects_one_sided(double level) const
{
    return z <= normal_quantile(level);
}

void finalize_report(TestReport& report, double total_variance)
{
    if (!(total_variance > 0.0)) throw DegenerateTestError("test statistic has zero variance (no events and none expected)");
    report.z = report.m_oslr / std::sqrt(total_variance);
    report.p_two_sided = 2.0 * normal_sf(std::abs(report.z));
    report.p_one_sided = normal_cdf(report.z);
}

namespace {

void check_time(double t)
{
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("analysis time must be finite and positive");
}

void check_weight(double w)
{
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("weight w must lie in [0, 1]");
}

struct Accumulated {
    std::size_t events = 0;
    double expected = 0.0;
};

Accumulated accumulate(const ReferenceCurve& ref, const Cohort& cohort_b, double t)
{
    check_time(t);
    Accumulated acc;
    for (const auto& obs : cohort_b) {
        if (obs.event && obs.time <= t) ++acc.events;
        acc.expected += ref.cumulative_hazard(std::min(obs.time, t));
    }
    return acc;
}

}  // namespace

double expected_events(const ReferenceCurve& ref, const Cohort& cohort_b, double t)
{
    return accumulate(ref, cohort_b, t).expected;
}

double compensated_process(const ReferenceCurve& ref, const Cohort& cohort_b, double t)
{
    const auto acc = accumulate(ref, cohort_b, t);
    return (static_cast<double>(acc.events) - acc.expected) / std::sqrt(static_cast<double>(cohort_b.size()));
}

double v1_hat(const Cohort& cohort_b, const ReferenceCurve& ref, double w, double t)
{
    check_weight(w);
    const auto acc = accumulate(ref, cohort_b, t);
    return (w * static_cast<double>(acc.events) + (1.0 - w) * acc.expected) / static_cast<double>(cohort_b.size());
}

Vec mean_gradient(const ReferenceCurve& ref, const Cohort& cohort_b, double t)
{
    check_time(t);
    const int q = ref.family().q();
    Vec g = Vec::Zero(q);
    for (const auto& obs : cohort_b) g += ref.gradient(std::min(obs.time, t));
    return g / static_cast<double>(cohort_b.size());
}

double v2_hat(const ReferenceCurve& ref, const Cohort& cohort_b, double t, double pi)
{
    if (!(pi > 0.0) || !std::isfinite(pi)) throw DomainError("allocation ratio pi must be positive");
    const Mat& info = ref.info_matrix();
    const Vec g = mean_gradient(ref, cohort_b, t);
    const Eigen::MatrixXd inv = pseudo_inverse(Eigen::MatrixXd(info));
    const Eigen::VectorXd gd = g;
    return std::max(0.0, pi * gd.dot(inv * gd));
}

TestReport oslr_test(const ReferenceCurve& ref, const Cohort& cohort_b, double t, double w, bool corrected,
                     std::optional<double> pi)
{
    check_weight(w);
    const auto acc = accumulate(ref, cohort_b, t);
    const double n_b = static_cast<double>(cohort_b.size());

    TestReport report;
    report.t = t;
    report.w = w;
    report.n_events = acc.events;
    report.expected_events = acc.expected;
    report.m_oslr = (static_cast<double>(acc.events) - acc.expected) / std::sqrt(n_b);
    report.v1 = (w * static_cast<double>(acc.events) + (1.0 - w) * acc.expected) / n_b;
    report.corrected = corrected;

    double total = report.v1;
    if (corrected) {
        if (!ref.is_fitted()) throw UsageError("corrected test requires a fitted reference");
        const double ratio = pi.value_or(n_b / static_cast<double>(ref.n_control()));
        report.pi = ratio;
        report.v2 = v2_hat(ref, cohort_b, t, ratio);
        total += *report.v2;
    }
    finalize_report(report, total);
    return report;
}

TestReport two_sample_logrank(const Cohort& cohort_a, const Cohort& cohort_b)
{
    struct Tagged {
        double time;
        bool event;
        bool in_b;
    };
    std::vector<Tagged> pooled;
    pooled.reserve(cohort_a.size() + cohort_b.size());
    for (const auto& obs : cohort_a) pooled.push_back({obs.time, obs.event, false});
    for (const auto& obs : cohort_b) pooled.push_back({obs.time, obs.event, true});
    std::sort(pooled.begin(), pooled.end(), [](const Tagged& a, const Tagged& b) { return a.time < b.time; });

    double at_risk = static_cast<double>(pooled.size());
    double at_risk_b = static_cast<double>(cohort_b.size());
    double observed_b = 0.0, expected_b = 0.0, variance = 0.0;
    std::size_t events_b = 0;

    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        double d = 0.0, d_b = 0.0, leaving = 0.0, leaving_b = 0.0;
        while (j < pooled.size() && pooled[j].time == pooled[i].time) {
            if (pooled[j].event) {
                d += 1.0;
                if (pooled[j].in_b) d_b += 1.0;
            }
            leaving += 1.0;
            if (pooled[j].in_b) leaving_b += 1.0;
            ++j;
        }
        if (d > 0.0) {
            observed_b += d_b;
            expected_b += at_risk_b * d / at_risk;
            if (at_risk > 1.0) {
                variance += d * (at_risk_b / at_risk) * (1.0 - at_risk_b / at_risk) * (at_risk - d) / (at_risk - 1.0);
            }
        }
        events_b += static_cast<std::size_t>(d_b);
        at_risk -= leaving;
        at_risk_b -= leaving_b;
        i = j;
    }
    if (cohort_a.n_events() + cohort_b.n_events() == 0)
        throw DegenerateTestError("no events in the pooled sample");

    TestReport report;
    report.t = std::max(cohort_a.max_time(), cohort_b.max_time());
    report.n_events = events_b;
    report.expected_events = expected_b;
    report.m_oslr = observed_b - expected_b;
    report.v1 = variance;
    report.pi = static_cast<double>(cohort_b.size()) / static_cast<double>(cohort_a.size());
    finalize_report(report, variance);
    return report;
}

}  // namespace oslr
