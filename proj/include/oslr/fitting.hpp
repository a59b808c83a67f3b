#pragma once

#include "oslr/families.hpp"
#include "oslr/survival_data.hpp"

#include <optional>
#include <span>
#include <vector>

namespace oslr {

/// Maximum likelihood fit of a parametric family to one cohort.
struct FitResult {
    Family family = kExponential;
    ParameterVector theta_hat;
    Mat info_matrix;          ///< empirical information J(theta_hat), per observation
    double loglik = 0.0;      ///< total log-likelihood at theta_hat
    double aic = 0.0;
    std::size_t n = 0;
    std::size_t n_events = 0;
    bool converged = false;
    int iterations = 0;
};

struct FitOptions {
    /// Stationarity tolerance on the mean log-likelihood gradient (natural scale).
    double tol = 1e-8;
    int max_iterations = 200;
};

/// Total log-likelihood of the cohort with gradient and Hessian.
Derivatives total_loglik(Family family, const ParameterVector& theta, const Cohort& cohort);

/**
 * Censored maximum likelihood estimate.
 *
 * Optimizes on log-parameters with BFGS and an Armijo backtracking line
 * search; a Nelder-Mead restart takes over when the line search fails, and a
 * final Newton polish uses the analytic Hessian. Throws FitError on zero
 * events, non-convergence, or a parameter drifting outside [1e-12, 1e12].
 */
FitResult fit_mle(Family family, const Cohort& cohort,
                  std::optional<ParameterVector> init = std::nullopt, const FitOptions& options = {});

/// Starting point: rate = events / total time, or shape 1 and scale = median time.
ParameterVector default_start(Family family, const Cohort& cohort);

/// -(1/n) * sum of per-observation log-likelihood Hessians.
Mat empirical_information(Family family, const ParameterVector& theta, const Cohort& cohort);

/// 2q - 2 loglik.
double aic(const FitResult& fit);

/// Lowest AIC; ties broken by fewer parameters, then by list order.
const FitResult& select_model(std::span<const FitResult> fits);

}  // namespace oslr
