#include "oslr/families.hpp"

#include "oslr/errors.hpp"

#include <cmath>

namespace oslr {

std::string_view Family::name() const noexcept
{
    switch (kind_) {
    case FamilyKind::exponential: return "exponential";
    case FamilyKind::weibull: return "weibull";
    case FamilyKind::loglogistic: return "loglogistic";
    }
    return "unknown";
}

Family Family::from_name(std::string_view name)
{
    if (name == "exponential") return kExponential;
    if (name == "weibull") return kWeibull;
    if (name == "loglogistic") return kLogLogistic;
    throw DomainError("unknown family '" + std::string(name) +
                      "' (expected exponential, weibull or loglogistic)");
}

ParameterVector::ParameterVector(Vec values) : values_(std::move(values))
{
    if (values_.size() < 1 || values_.size() > kMaxParams)
        throw DomainError("parameter vector must have 1 or 2 components");
    for (int k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]) || values_[k] <= 0.0)
            throw DomainError("parameters must be finite and strictly positive");
    }
}

ParameterVector::ParameterVector(std::initializer_list<double> values)
    : ParameterVector([&] {
          Vec v(static_cast<Eigen::Index>(values.size()));
          int k = 0;
          for (double x : values) v[k++] = x;
          return v;
      }())
{
}

void check_parameters(Family family, const Vec& theta)
{
    if (theta.size() != family.q()) {
        throw DomainError(std::string(family.name()) + " expects " + std::to_string(family.q()) +
                          " parameter(s), got " + std::to_string(theta.size()));
    }
    for (int k = 0; k < theta.size(); ++k) {
        if (!std::isfinite(theta[k]) || theta[k] <= 0.0)
            throw DomainError("parameters must be finite and strictly positive");
    }
}

namespace {

void check_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

Derivatives zero_derivatives(int q)
{
    Derivatives d;
    d.gradient = Vec::Zero(q);
    d.hessian = Mat::Zero(q, q);
    return d;
}

// Derivatives of p = (t/scale)^shape, with u = log(t/scale).
struct PowerTerm {
    double p, u;
    double dk, ds;          // dp/dshape, dp/dscale
    double dkk, dks, dss;   // second derivatives
};

PowerTerm power_term(double shape, double scale, double t)
{
    PowerTerm r;
    r.u = std::log(t) - std::log(scale);
    r.p = std::exp(shape * r.u);
    r.dk = r.p * r.u;
    r.ds = -shape * r.p / scale;
    r.dkk = r.p * r.u * r.u;
    r.dks = -r.p * (shape * r.u + 1.0) / scale;
    r.dss = shape * (shape + 1.0) * r.p / (scale * scale);
    return r;
}

}  // namespace

Derivatives cumulative_hazard_derivatives(Family family, const Vec& theta, double t)
{
    const int q = family.q();
    if (t <= 0.0) return zero_derivatives(q);

    Derivatives d = zero_derivatives(q);
    switch (family.kind()) {
    case FamilyKind::exponential:
        d.value = theta[0] * t;
        d.gradient[0] = t;
        break;
    case FamilyKind::weibull: {
        const auto pt = power_term(theta[0], theta[1], t);
        d.value = pt.p;
        d.gradient << pt.dk, pt.ds;
        d.hessian << pt.dkk, pt.dks, pt.dks, pt.dss;
        break;
    }
    case FamilyKind::loglogistic: {
        const auto pt = power_term(theta[0], theta[1], t);
        const double g1 = 1.0 / (1.0 + pt.p);  // d log(1+p)/dp
        const double g2 = -g1 * g1;
        d.value = std::log1p(pt.p);
        d.gradient << g1 * pt.dk, g1 * pt.ds;
        d.hessian(0, 0) = g2 * pt.dk * pt.dk + g1 * pt.dkk;
        d.hessian(0, 1) = g2 * pt.dk * pt.ds + g1 * pt.dks;
        d.hessian(1, 0) = d.hessian(0, 1);
        d.hessian(1, 1) = g2 * pt.ds * pt.ds + g1 * pt.dss;
        break;
    }
    }
    return d;
}

Derivatives log_hazard_derivatives(Family family, const Vec& theta, double t)
{
    Derivatives d = zero_derivatives(family.q());
    switch (family.kind()) {
    case FamilyKind::exponential:
        d.value = std::log(theta[0]);
        d.gradient[0] = 1.0 / theta[0];
        d.hessian(0, 0) = -1.0 / (theta[0] * theta[0]);
        break;
    case FamilyKind::weibull:
    case FamilyKind::loglogistic: {
        // Weibull part: log shape - shape*log scale + (shape-1)*log t
        const double shape = theta[0], scale = theta[1];
        const double u = std::log(t) - std::log(scale);
        d.value = std::log(shape) - std::log(scale) + (shape - 1.0) * u;
        d.gradient << 1.0 / shape + u, -shape / scale;
        d.hessian << -1.0 / (shape * shape), -1.0 / scale, -1.0 / scale, shape / (scale * scale);
        if (family.kind() == FamilyKind::loglogistic) {
            // lambda_LL = lambda_W / (1 + p), so log lambda_LL = log lambda_W - Lambda_LL
            const auto ch = cumulative_hazard_derivatives(family, theta, t);
            d.value -= ch.value;
            d.gradient -= ch.gradient;
            d.hessian -= ch.hessian;
        }
        break;
    }
    }
    return d;
}

Derivatives loglik_derivatives_unchecked(Family family, const Vec& theta, const Observation& obs)
{
    Derivatives d = cumulative_hazard_derivatives(family, theta, obs.time);
    d.value = -d.value;
    d.gradient = -d.gradient;
    d.hessian = -d.hessian;
    if (obs.event) {
        const auto lh = log_hazard_derivatives(family, theta, obs.time);
        d.value += lh.value;
        d.gradient += lh.gradient;
        d.hessian += lh.hessian;
    }
    return d;
}

Derivatives loglik_derivatives(Family family, const ParameterVector& theta, const Observation& obs)
{
    check_parameters(family, theta.values());
    validate(obs);
    return loglik_derivatives_unchecked(family, theta.values(), obs);
}

double cumulative_hazard(Family family, const ParameterVector& theta, double t)
{
    check_parameters(family, theta.values());
    check_time(t);
    if (t == 0.0) return 0.0;
    const Vec& th = theta.values();
    switch (family.kind()) {
    case FamilyKind::exponential: return th[0] * t;
    case FamilyKind::weibull: return std::pow(t / th[1], th[0]);
    case FamilyKind::loglogistic: return std::log1p(std::pow(t / th[1], th[0]));
    }
    return 0.0;
}

double survival(Family family, const ParameterVector& theta, double t)
{
    return std::exp(-cumulative_hazard(family, theta, t));
}

double hazard(Family family, const ParameterVector& theta, double t)
{
    check_parameters(family, theta.values());
    check_time(t);
    const Vec& th = theta.values();
    switch (family.kind()) {
    case FamilyKind::exponential: return th[0];
    case FamilyKind::weibull: return th[0] / th[1] * std::pow(t / th[1], th[0] - 1.0);
    case FamilyKind::loglogistic: {
        const double p = std::pow(t / th[1], th[0]);
        return th[0] / th[1] * std::pow(t / th[1], th[0] - 1.0) / (1.0 + p);
    }
    }
    return 0.0;
}

double density(Family family, const ParameterVector& theta, double t)
{
    return hazard(family, theta, t) * survival(family, theta, t);
}

Vec grad_cumulative_hazard(Family family, const ParameterVector& theta, double t)
{
    check_parameters(family, theta.values());
    check_time(t);
    return cumulative_hazard_derivatives(family, theta.values(), t).gradient;
}

}  // namespace oslr
