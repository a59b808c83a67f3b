#include "oslr/fitting.hpp"

#include "oslr/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace oslr {

namespace {

constexpr double kMinParam = 1e-12;
constexpr double kMaxParam = 1e12;

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

double loglik_value(Family family, const Vec& theta, const Cohort& cohort)
{
    double total = 0.0;
    switch (family.kind()) {
    case FamilyKind::exponential: {
        const double log_rate = std::log(theta[0]);
        for (const auto& obs : cohort) total += (obs.event ? log_rate : 0.0) - theta[0] * obs.time;
        break;
    }
    case FamilyKind::weibull:
    case FamilyKind::loglogistic: {
        const double shape = theta[0], log_scale = std::log(theta[1]);
        const double log_w = std::log(shape) - log_scale;
        const bool ll = family.kind() == FamilyKind::loglogistic;
        for (const auto& obs : cohort) {
            const double u = std::log(obs.time) - log_scale;
            const double p = std::exp(shape * u);
            const double cum = ll ? std::log1p(p) : p;
            total -= cum;
            if (obs.event) total += log_w + (shape - 1.0) * u - (ll ? cum : 0.0);
        }
        break;
    }
    }
    return total;
}

// Objective on log-parameters: negative mean log-likelihood.
struct Objective {
    Family family;
    const Cohort& cohort;
    double n;

    double value(const Vec& phi) const
    {
        const Vec theta = phi.array().exp().matrix();
        for (int k = 0; k < theta.size(); ++k)
            if (!(theta[k] > 0.0) || !std::isfinite(theta[k])) return std::numeric_limits<double>::infinity();
        const double v = -loglik_value(family, theta, cohort) / n;
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }

    struct Full {
        double value;
        Vec grad;  // log scale
        Mat hess;  // log scale
    };

    Full full(const Vec& phi) const
    {
        const Vec theta = phi.array().exp().matrix();
        const Derivatives d = total_loglik_unchecked(theta);
        Full f;
        f.value = -d.value / n;
        f.grad = -(theta.array() * d.gradient.array()).matrix() / n;
        Mat h = theta.asDiagonal() * d.hessian * theta.asDiagonal();
        h.diagonal() += (theta.array() * d.gradient.array()).matrix();
        f.hess = -h / n;
        return f;
    }

    Derivatives total_loglik_unchecked(const Vec& theta) const
    {
        const int q = family.q();
        Derivatives total{0.0, Vec::Zero(q), Mat::Zero(q, q)};
        for (const auto& obs : cohort) {
            const auto d = loglik_derivatives_unchecked(family, theta, obs);
            total.value += d.value;
            total.gradient += d.gradient;
            total.hessian += d.hessian;
        }
        return total;
    }
};

void check_bounds(const Vec& phi)
{
    for (int k = 0; k < phi.size(); ++k) {
        const double theta = std::exp(phi[k]);
        if (!(theta >= kMinParam && theta <= kMaxParam)) {
            throw FitError("parameter drifted to the boundary of the parameter space",
                           to_std(phi.array().exp().matrix()));
        }
    }
}

// Downhill simplex on the log-parameter objective. Returns the best vertex.
Vec nelder_mead(const Objective& obj, const Vec& start, int& iterations)
{
    const int q = static_cast<int>(start.size());
    std::array<Vec, kMaxParams + 1> x;
    std::array<double, kMaxParams + 1> fx;
    for (int i = 0; i <= q; ++i) {
        x[i] = start;
        if (i > 0) x[i][i - 1] += 0.1;
        fx[i] = obj.value(x[i]);
    }
    for (int it = 0; it < 1000; ++it, ++iterations) {
        std::array<int, kMaxParams + 1> order;
        std::iota(order.begin(), order.begin() + q + 1, 0);
        std::sort(order.begin(), order.begin() + q + 1, [&](int a, int b) { return fx[a] < fx[b]; });
        const int best = order[0], worst = order[q], second = order[q - (q > 0 ? 1 : 0)];
        if (std::abs(fx[worst] - fx[best]) <= 1e-15 * (1.0 + std::abs(fx[best]))) break;

        Vec centroid = Vec::Zero(q);
        for (int i = 0; i <= q; ++i)
            if (i != worst) centroid += x[i];
        centroid /= q;

        const Vec reflected = centroid + (centroid - x[worst]);
        const double fr = obj.value(reflected);
        if (fr < fx[best]) {
            const Vec expanded = centroid + 2.0 * (centroid - x[worst]);
            const double fe = obj.value(expanded);
            if (fe < fr) { x[worst] = expanded; fx[worst] = fe; }
            else { x[worst] = reflected; fx[worst] = fr; }
        } else if (fr < fx[second]) {
            x[worst] = reflected;
            fx[worst] = fr;
        } else {
            const Vec contracted = centroid + 0.5 * (x[worst] - centroid);
            const double fc = obj.value(contracted);
            if (fc < fx[worst]) {
                x[worst] = contracted;
                fx[worst] = fc;
            } else {
                for (int i = 0; i <= q; ++i) {
                    if (i == best) continue;
                    x[i] = x[best] + 0.5 * (x[i] - x[best]);
                    fx[i] = obj.value(x[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= q; ++i)
        if (fx[i] < fx[best]) best = i;
    return x[best];
}

double median_time(const Cohort& cohort)
{
    std::vector<double> times;
    times.reserve(cohort.size());
    for (const auto& obs : cohort) times.push_back(obs.time);
    const std::size_t mid = times.size() / 2;
    std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(mid), times.end());
    double m = times[mid];
    if (times.size() % 2 == 0) {
        const double lower = *std::max_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

}  // namespace

Derivatives total_loglik(Family family, const ParameterVector& theta, const Cohort& cohort)
{
    check_parameters(family, theta.values());
    Objective obj{family, cohort, 1.0};
    return obj.total_loglik_unchecked(theta.values());
}

ParameterVector default_start(Family family, const Cohort& cohort)
{
    if (family.kind() == FamilyKind::exponential) {
        const double events = static_cast<double>(std::max<std::size_t>(cohort.n_events(), 1));
        return ParameterVector{events / cohort.total_time()};
    }
    return ParameterVector{1.0, median_time(cohort)};
}

FitResult fit_mle(Family family, const Cohort& cohort, std::optional<ParameterVector> init,
                  const FitOptions& options)
{
    if (cohort.n_events() == 0) throw FitError("no events: likelihood unbounded/degenerate");
    const ParameterVector start = init ? *init : default_start(family, cohort);
    check_parameters(family, start.values());

    const double n = static_cast<double>(cohort.size());
    const Objective obj{family, cohort, n};
    const int q = family.q();

    Vec phi = start.values().array().log().matrix();
    auto cur = obj.full(phi);
    if (!std::isfinite(cur.value)) throw FitError("log-likelihood is not finite at the start point", to_std(start.values()));

    // Inverse Hessian approximation; seeded from the analytic curvature when it is positive definite.
    Mat inv_h = Mat::Identity(q, q);
    if (Eigen::LLT<Mat> llt(cur.hess); llt.info() == Eigen::Success) inv_h = llt.solve(Mat::Identity(q, q));

    // mean log-scale gradient tolerance; total-gradient tolerance is tol * n
    const double gtol = options.tol;
    int iterations = 0;
    bool converged = false;
    int restarts = 0;

    while (iterations < options.max_iterations) {
        if (cur.grad.norm() <= gtol) {
            converged = true;
            break;
        }
        ++iterations;

        Vec dir = -inv_h * cur.grad;
        double slope = cur.grad.dot(dir);
        if (!(slope < 0.0)) {
            inv_h = Mat::Identity(q, q);
            dir = -cur.grad;
            slope = cur.grad.dot(dir);
        }
        const double max_step = 2.0;
        double step = std::min(1.0, max_step / std::max(dir.norm(), 1e-300));

        bool accepted = false;
        Vec next;
        double next_value = 0.0;
        for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
            next = phi + step * dir;
            next_value = obj.value(next);
            if (next_value <= cur.value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }

        if (!accepted) {
            if (++restarts > 3) break;
            Vec restart = nelder_mead(obj, phi, iterations);
            if (!(obj.value(restart) < cur.value)) break;
            phi = restart;
            check_bounds(phi);
            cur = obj.full(phi);
            inv_h = Mat::Identity(q, q);
            continue;
        }

        auto nxt = obj.full(next);
        const Vec s = next - phi;
        const Vec y = nxt.grad - cur.grad;
        const double sy = s.dot(y);
        if (sy > 1e-300) {
            const Mat eye = Mat::Identity(q, q);
            const double rho = 1.0 / sy;
            inv_h = (eye - rho * s * y.transpose()) * inv_h * (eye - rho * y * s.transpose()) +
                    rho * s * s.transpose();
        }
        phi = next;
        cur = std::move(nxt);
        check_bounds(phi);
    }

    // Newton polish with the analytic Hessian.
    for (int k = 0; k < 8; ++k) {
        Eigen::LLT<Mat> llt(cur.hess);
        if (llt.info() != Eigen::Success) break;
        const Vec cand = phi - llt.solve(cur.grad);
        if (!std::isfinite(obj.value(cand))) break;
        auto nxt = obj.full(cand);
        if (!(nxt.grad.norm() < cur.grad.norm())) break;
        phi = cand;
        cur = std::move(nxt);
        ++iterations;
    }
    check_bounds(phi);
    if (cur.grad.norm() <= gtol) converged = true;

    const Vec theta = phi.array().exp().matrix();
    if (!converged) {
        throw FitError("maximum likelihood fit did not converge after " + std::to_string(iterations) +
                           " iterations",
                       to_std(theta));
    }

    FitResult fit;
    fit.family = family;
    fit.theta_hat = ParameterVector(theta);
    const Derivatives total = obj.total_loglik_unchecked(theta);
    fit.info_matrix = -total.hessian / n;
    fit.info_matrix = 0.5 * (fit.info_matrix + fit.info_matrix.transpose()).eval();
    fit.loglik = total.value;
    fit.n = cohort.size();
    fit.n_events = cohort.n_events();
    fit.converged = true;
    fit.iterations = iterations;
    fit.aic = aic(fit);
    return fit;
}

Mat empirical_information(Family family, const ParameterVector& theta, const Cohort& cohort)
{
    const Derivatives total = total_loglik(family, theta, cohort);
    Mat info = -total.hessian / static_cast<double>(cohort.size());
    return 0.5 * (info + info.transpose());
}

double aic(const FitResult& fit)
{
    return 2.0 * fit.family.q() - 2.0 * fit.loglik;
}

const FitResult& select_model(std::span<const FitResult> fits)
{
    const FitResult* best = nullptr;
    for (const auto& fit : fits) {
        if (!fit.converged) continue;
        if (best == nullptr || fit.aic < best->aic ||
            (fit.aic == best->aic && fit.family.q() < best->family.q())) {
            best = &fit;
        }
    }
    if (best == nullptr) throw SelectionError("no converged fit to select from");
    return *best;
}

}  // namespace oslr
