#pragma once

// Independent oracles used by the unit and acceptance tests. Nothing here
// calls into the analytic derivative code it is used to check.

#include "oslr/families.hpp"
#include "oslr/survival_data.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace oslr::testing {

inline double rel_err(double a, double b, double floor = 1e-12)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Central difference of f along coordinate k with step h_k = rel_step * |x_k|.
inline Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double rel_step = 1e-5)
{
    Eigen::VectorXd g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = rel_step * std::max(std::abs(x[k]), 1e-8);
        Eigen::VectorXd xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        g[k] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// Hessian by second-order central differences of f.
inline Eigen::MatrixXd central_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x, double rel_step = 1e-4)
{
    const Eigen::Index q = x.size();
    Eigen::MatrixXd h(q, q);
    Eigen::VectorXd step(q);
    for (Eigen::Index k = 0; k < q; ++k) step[k] = rel_step * std::max(std::abs(x[k]), 1e-8);
    const double f0 = f(x);
    for (Eigen::Index k = 0; k < q; ++k) {
        for (Eigen::Index l = k; l < q; ++l) {
            if (k == l) {
                Eigen::VectorXd xp = x, xm = x;
                xp[k] += step[k];
                xm[k] -= step[k];
                h(k, k) = (f(xp) - 2.0 * f0 + f(xm)) / (step[k] * step[k]);
            } else {
                auto at = [&](double sk, double sl) {
                    Eigen::VectorXd y = x;
                    y[k] += sk * step[k];
                    y[l] += sl * step[l];
                    return f(y);
                };
                h(k, l) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * step[k] * step[l]);
                h(l, k) = h(k, l);
            }
        }
    }
    return h;
}

/// Gauss-Legendre quadrature (20 nodes) on each of `panels` subintervals of [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 64)
{
    static const double x[10] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                                 0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                                 0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                                 0.9931285991850949};
    static const double w[10] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                                 0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                                 0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                                 0.0176140071391521};
    double total = 0.0;
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width, mid = lo + 0.5 * width, half = 0.5 * width;
        for (int i = 0; i < 10; ++i) total += w[i] * half * (f(mid - half * x[i]) + f(mid + half * x[i]));
    }
    return total;
}

/// Cumulative hazard straight from the family definitions (no shared code path).
inline double plain_cumhaz(Family family, const Eigen::VectorXd& theta, double t)
{
    switch (family.kind()) {
    case FamilyKind::exponential: return theta[0] * t;
    case FamilyKind::weibull: return std::pow(t / theta[1], theta[0]);
    case FamilyKind::loglogistic: return std::log1p(std::pow(t / theta[1], theta[0]));
    }
    return 0.0;
}

inline double plain_hazard(Family family, const Eigen::VectorXd& theta, double t)
{
    switch (family.kind()) {
    case FamilyKind::exponential: return theta[0];
    case FamilyKind::weibull: return theta[0] / theta[1] * std::pow(t / theta[1], theta[0] - 1.0);
    case FamilyKind::loglogistic: {
        const double p = std::pow(t / theta[1], theta[0]);
        return theta[0] / theta[1] * std::pow(t / theta[1], theta[0] - 1.0) / (1.0 + p);
    }
    }
    return 0.0;
}

/// Total log-likelihood from the plain formulas.
inline double plain_loglik(Family family, const Eigen::VectorXd& theta, const Cohort& cohort)
{
    double total = 0.0;
    for (const auto& obs : cohort) {
        total -= plain_cumhaz(family, theta, obs.time);
        if (obs.event) total += std::log(plain_hazard(family, theta, obs.time));
    }
    return total;
}

/// Unweighted two-sample log-rank by direct counting at every distinct event time.
struct BruteLogRank {
    double u = 0.0, v = 0.0, z = 0.0;
};

inline BruteLogRank brute_logrank(const Cohort& a, const Cohort& b)
{
    std::set<double> event_times;
    for (const auto& o : a) if (o.event) event_times.insert(o.time);
    for (const auto& o : b) if (o.event) event_times.insert(o.time);
    BruteLogRank r;
    for (double t : event_times) {
        double ya = 0, yb = 0, da = 0, db = 0;
        for (const auto& o : a) { ya += o.time >= t; da += (o.time == t && o.event); }
        for (const auto& o : b) { yb += o.time >= t; db += (o.time == t && o.event); }
        const double y = ya + yb, d = da + db;
        r.u += db - yb * d / y;
        if (y > 1) r.v += d * (yb / y) * (ya / y) * (y - d) / (y - 1);
    }
    r.z = r.u / std::sqrt(r.v);
    return r;
}

/// Random cohort: Weibull event times with uniform censoring on [c_lo, c_hi].
inline Cohort random_weibull_cohort(std::mt19937_64& gen, std::size_t n, double shape, double scale, double c_lo,
                                    double c_hi)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < n; ++i) {
        double u = unif(gen);
        while (u <= 0.0) u = unif(gen);
        const double t = scale * std::pow(-std::log(u), 1.0 / shape);
        const double c = c_lo + (c_hi - c_lo) * unif(gen);
        obs.push_back({std::min(t, c), t <= c});
    }
    return Cohort(std::move(obs));
}

inline Cohort random_loglogistic_cohort(std::mt19937_64& gen, std::size_t n, double shape, double scale,
                                        double c_hi)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < n; ++i) {
        double u = unif(gen);
        while (u <= 0.0) u = unif(gen);
        // S(t) = 1 / (1 + (t/scale)^shape) = u
        const double t = scale * std::pow(1.0 / u - 1.0, 1.0 / shape);
        const double c = c_hi * unif(gen);
        if (c <= 0.0) continue;
        obs.push_back({std::min(t, c), t <= c});
    }
    return Cohort(std::move(obs));
}

inline Cohort cohort_of(std::initializer_list<std::pair<double, int>> rows, std::string label = {})
{
    std::vector<Observation> obs;
    for (auto [t, e] : rows) obs.push_back({t, e != 0});
    return Cohort(std::move(obs), std::move(label));
}

}  // namespace oslr::testing
