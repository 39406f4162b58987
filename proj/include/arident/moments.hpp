#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "arident/errors.hpp"
#include "arident/system.hpp"

namespace arident {

/// Stationary mean plus autocovariances Psi(0..tau_max) of the process
/// output.  Autocovariances are central moments, so they are invariant
/// under mean shifts of either source.
struct CovarianceSeq {
    double mean = 0.0;
    std::vector<double> values;

    std::size_t tau_max() const noexcept { return values.empty() ? 0 : values.size() - 1; }

    double at(std::size_t tau) const {
        if (tau >= values.size()) {
            throw spec_error("autocovariance lag " + std::to_string(tau) +
                             " exceeds tau_max " + std::to_string(tau_max()));
        }
        return values[tau];
    }
};

inline double theoretical_mean(const SystemParams& params) {
    params.validate();
    return params.stationary_mean();
}

namespace detail {

inline void require_white_sources(const SystemParams& params, const char* op) {
    if (params.q.kind != NoiseKind::White) {
        throw spec_error(std::string(op) +
                         " assumes a white process input; use colored_covariance "
                         "for AR(1)-filtered input");
    }
}

} // namespace detail

/// Stationary output variance with white sources.  The recursion shapes q
/// into an AR(1) signal of variance delta2 / (1 - lambda^2); v passes
/// through unfiltered and adds xi2 on top.
inline double theoretical_variance(const SystemParams& params) {
    params.validate();
    detail::require_white_sources(params, "theoretical_variance");
    const double lambda = params.lambda;
    return params.q.variance / (1.0 - lambda * lambda) + params.v.variance;
}

/// Autocovariances Psi(0..tau_max) with white sources.  For tau >= 1 only
/// the filtered part of the signal is correlated with its past, so
/// Psi(tau) = lambda^tau * delta2 / (1 - lambda^2).  The lags are built by
/// repeated multiplication, which makes Psi(tau+1) == lambda * Psi(tau)
/// hold exactly in floating point, not just analytically.
inline CovarianceSeq theoretical_covariance(const SystemParams& params,
                                            std::size_t tau_max) {
    params.validate();
    detail::require_white_sources(params, "theoretical_covariance");
    if (tau_max < 2) {
        throw spec_error("tau_max must be at least 2 to characterise the process");
    }
    const double lambda = params.lambda;
    const double filtered_var = params.q.variance / (1.0 - lambda * lambda);

    CovarianceSeq cov;
    cov.mean = params.stationary_mean();
    cov.values.resize(tau_max + 1);
    cov.values[0] = filtered_var + params.v.variance;
    cov.values[1] = lambda * filtered_var;
    for (std::size_t tau = 2; tau <= tau_max; ++tau) {
        cov.values[tau] = lambda * cov.values[tau - 1];
    }
    return cov;
}

/// Same moments as theoretical_covariance but obtained by solving the
/// stationary two-equation recursion
///
///   Psi(0) = lambda * Psi(1) + delta2 + xi2
///   Psi(1) = lambda * Psi(0) - lambda * xi2
///
/// and propagating Psi(tau) = lambda * Psi(tau-1) upward.  A deliberately
/// different arithmetic path, kept as a consistency check on the closed
/// form.
inline CovarianceSeq covariance_via_recursion(const SystemParams& params,
                                              std::size_t tau_max) {
    params.validate();
    detail::require_white_sources(params, "covariance_via_recursion");
    if (tau_max < 2) {
        throw spec_error("tau_max must be at least 2 to characterise the process");
    }
    const double lambda = params.lambda;
    const double delta2 = params.q.variance;
    const double xi2 = params.v.variance;

    CovarianceSeq cov;
    cov.mean = params.stationary_mean();
    cov.values.resize(tau_max + 1);
    cov.values[0] = (delta2 + xi2 - lambda * lambda * xi2) / (1.0 - lambda * lambda);
    cov.values[1] = lambda * cov.values[0] - lambda * xi2;
    for (std::size_t tau = 2; tau <= tau_max; ++tau) {
        cov.values[tau] = lambda * cov.values[tau - 1];
    }
    return cov;
}

/// Autocovariances when the process input is itself AR(1)-filtered:
/// q(t) = a * q(t-1) + e(t), var(e) = sigma2.  Writing x for the output of
/// the lambda-recursion driven by q, the joint (x, q) stationary moments
/// give
///
///   var(q)        = sigma2 / (1 - a^2)
///   cov(x, q)     = var(q) / (1 - a * lambda)
///   Psi_x(0)      = (var(q) + 2 * a * lambda * cov(x, q)) / (1 - lambda^2)
///   Psi_x(tau)    = lambda * Psi_x(tau-1) + a^tau * cov(x, q)   (tau >= 1)
///
/// The white measurement noise still adds xi2 at lag zero only.
inline CovarianceSeq colored_covariance(const SystemParams& params,
                                        std::size_t tau_max) {
    params.validate();
    if (params.q.kind != NoiseKind::ColoredAR1) {
        throw spec_error("colored_covariance requires an AR(1)-filtered process "
                         "input; use theoretical_covariance for white input");
    }
    if (tau_max < 2) {
        throw spec_error("tau_max must be at least 2 to characterise the process");
    }
    const double lambda = params.lambda;
    const double a = params.q.ar_coeff;
    const double var_q = params.q.variance / (1.0 - a * a);
    const double cross = var_q / (1.0 - a * lambda);

    CovarianceSeq cov;
    cov.mean = params.stationary_mean();
    cov.values.resize(tau_max + 1);
    const double psi_x0 =
        (var_q + 2.0 * a * lambda * cross) / (1.0 - lambda * lambda);
    cov.values[0] = psi_x0 + params.v.variance;

    double psi_x = psi_x0;
    double apow = 1.0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
        apow *= a;
        psi_x = lambda * psi_x + apow * cross;
        cov.values[tau] = psi_x;
    }
    return cov;
}

/// Dispatches on the input kind so callers that only hold a SystemParams
/// do not have to branch themselves.
inline CovarianceSeq covariance_for(const SystemParams& params, std::size_t tau_max) {
    return params.q.kind == NoiseKind::White
               ? theoretical_covariance(params, tau_max)
               : colored_covariance(params, tau_max);
}

} // namespace arident
