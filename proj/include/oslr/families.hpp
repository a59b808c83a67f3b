#pragma once

#include "oslr/survival_data.hpp"

#include <Eigen/Core>

#include <string>
#include <string_view>

namespace oslr {

inline constexpr int kMaxParams = 2;

/// Parameter-sized vector and matrix with inline storage (q <= 2).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxParams, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxParams, kMaxParams>;

enum class FamilyKind { exponential, weibull, loglogistic };

/**
 * Parametric survival family.
 *
 * Parametrizations (natural scale, all parameters strictly positive):
 *   exponential(rate)           Lambda(t) = rate * t
 *   weibull(shape, scale)       Lambda(t) = (t / scale)^shape
 *   loglogistic(shape, scale)   Lambda(t) = log(1 + (t / scale)^shape)
 */
class Family {
public:
    constexpr Family(FamilyKind kind) noexcept : kind_(kind) {}

    constexpr FamilyKind kind() const noexcept { return kind_; }
    constexpr int q() const noexcept { return kind_ == FamilyKind::exponential ? 1 : 2; }
    std::string_view name() const noexcept;

    /// Parses `exponential | weibull | loglogistic`; throws DomainError otherwise.
    static Family from_name(std::string_view name);

    friend constexpr bool operator==(Family a, Family b) noexcept { return a.kind_ == b.kind_; }

private:
    FamilyKind kind_;
};

inline constexpr Family kExponential{FamilyKind::exponential};
inline constexpr Family kWeibull{FamilyKind::weibull};
inline constexpr Family kLogLogistic{FamilyKind::loglogistic};

/// Point of the open parameter space: q strictly positive finite components.
class ParameterVector {
public:
    ParameterVector() = default;
    explicit ParameterVector(Vec values);
    ParameterVector(std::initializer_list<double> values);

    const Vec& values() const noexcept { return values_; }
    int q() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int k) const { return values_[k]; }

private:
    Vec values_;
};

/// Value, gradient and Hessian with respect to the parameter vector.
struct Derivatives {
    double value = 0.0;
    Vec gradient;
    Mat hessian;
};

/// Throws DomainError unless theta has dimension family.q() and lies in the parameter space.
void check_parameters(Family family, const Vec& theta);

double cumulative_hazard(Family family, const ParameterVector& theta, double t);
double survival(Family family, const ParameterVector& theta, double t);
double hazard(Family family, const ParameterVector& theta, double t);
double density(Family family, const ParameterVector& theta, double t);

/// Gradient of Lambda(theta, t) in theta. Equal to zero at t = 0 (limit).
Vec grad_cumulative_hazard(Family family, const ParameterVector& theta, double t);

/// Lambda(theta, t) with first and second parameter derivatives.
Derivatives cumulative_hazard_derivatives(Family family, const Vec& theta, double t);

/// log lambda(theta, t) with first and second parameter derivatives; t > 0.
Derivatives log_hazard_derivatives(Family family, const Vec& theta, double t);

/// Per-observation log-likelihood: log f if event, log S if censored, with
/// exact gradient and Hessian.
Derivatives loglik_derivatives(Family family, const ParameterVector& theta, const Observation& obs);

/// Unchecked variant used in the optimizer's inner loop.
Derivatives loglik_derivatives_unchecked(Family family, const Vec& theta, const Observation& obs);

}  // namespace oslr
