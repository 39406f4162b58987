#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arident/errors.hpp"
#include "arident/moments.hpp"

namespace arident {

/// An autoregressive predictor y_hat(t) = sum_i coeffs[i] * y(t - 1 - i).
/// pred_error_variance is the stationary variance of y - y_hat when it is
/// known (theory paths fill it in; data fits leave it empty).
struct ArEstimate {
    int order = 1;
    std::vector<double> coeffs;
    std::optional<double> pred_error_variance;
};

/// Mean squared one-step prediction error E[(y(t) - sum_i c_i y(t-1-i))^2]
/// under the stationary law described by cov.  With c = (1, -coeffs) this
/// is the quadratic form sum_{i,j} c_i c_j Psi(|i-j|) plus the squared
/// error mean (sum_i c_i * mean)^2; minimising it in coeffs is exactly the
/// prediction error method for this model class.
inline double prediction_cost(const CovarianceSeq& cov, std::span<const double> coeffs) {
    if (coeffs.empty() || coeffs.size() > 2) {
        throw spec_error("predictor order must be 1 or 2, got " +
                         std::to_string(coeffs.size()));
    }
    if (cov.tau_max() < coeffs.size()) {
        throw spec_error("prediction_cost needs autocovariances up to the "
                         "predictor order");
    }
    std::vector<double> c;
    c.reserve(coeffs.size() + 1);
    c.push_back(1.0);
    for (double phi : coeffs) c.push_back(-phi);

    double quad = 0.0;
    double csum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        csum += c[i];
        for (std::size_t j = 0; j < c.size(); ++j) {
            const std::size_t lag = i > j ? i - j : j - i;
            quad += c[i] * c[j] * cov.values[lag];
        }
    }
    return quad + csum * csum * cov.mean * cov.mean;
}

/// Variance of the prediction error: prediction_cost minus the squared
/// error mean.  The mean contributions cancel analytically, so for the
/// optimal coefficients this equals the pure autocovariance quadratic form.
inline double prediction_error_variance(const CovarianceSeq& cov,
                                        const ArEstimate& est) {
    double phi_sum = 0.0;
    for (double phi : est.coeffs) phi_sum += phi;
    const double err_mean = (1.0 - phi_sum) * cov.mean;
    return prediction_cost(cov, est.coeffs) - err_mean * err_mean;
}

namespace detail {

// Second moments about zero, r(tau) = Psi(tau) + mean^2.  The optimal
// predictor without an intercept term sees raw second moments, so a nonzero
// mean shifts the optimum.
inline double raw_moment(const CovarianceSeq& cov, std::size_t tau) {
    return cov.values[tau] + cov.mean * cov.mean;
}

} // namespace detail

/// Minimiser of prediction_cost over first-order predictors: phi = r1 / r0
/// with r the raw second moments.
inline ArEstimate optimal_ar1(const CovarianceSeq& cov) {
    if (cov.tau_max() < 1) {
        throw spec_error("optimal_ar1 needs autocovariances up to lag 1");
    }
    const double r0 = detail::raw_moment(cov, 0);
    if (!(r0 > 0.0)) {
        throw non_identifiable_error(
            "process has zero power; every first-order predictor is equally "
            "optimal");
    }
    ArEstimate est;
    est.order = 1;
    est.coeffs = {detail::raw_moment(cov, 1) / r0};
    est.pred_error_variance = prediction_error_variance(cov, est);
    return est;
}

/// Minimiser of prediction_cost over second-order predictors: the solution
/// of the 2x2 normal equations [r0 r1; r1 r0] * phi = [r1; r2].
inline ArEstimate optimal_ar2(const CovarianceSeq& cov) {
    if (cov.tau_max() < 2) {
        throw spec_error("optimal_ar2 needs autocovariances up to lag 2");
    }
    const double r0 = detail::raw_moment(cov, 0);
    const double r1 = detail::raw_moment(cov, 1);
    const double r2 = detail::raw_moment(cov, 2);
    if (!(r0 > 0.0)) {
        throw non_identifiable_error(
            "process has zero power; every second-order predictor is equally "
            "optimal");
    }
    // Eigenvalues of the Toeplitz normal matrix are r0 +/- r1.
    const double gap = r0 - std::abs(r1);
    if (!(gap > 0.0) || (r0 + std::abs(r1)) / gap > 1e12) {
        throw non_identifiable_error(
            "second-order normal matrix is singular or near-singular; the "
            "prediction cost has infinitely many global minima");
    }
    const double det = r0 * r0 - r1 * r1;
    ArEstimate est;
    est.order = 2;
    est.coeffs = {r1 * (r0 - r2) / det, (r0 * r2 - r1 * r1) / det};
    est.pred_error_variance = prediction_error_variance(cov, est);
    return est;
}

/// Both optima behind one order switch.
inline ArEstimate optimal_ar(const CovarianceSeq& cov, int order) {
    if (order == 1) return optimal_ar1(cov);
    if (order == 2) return optimal_ar2(cov);
    throw spec_error("predictor order must be 1 or 2, got " + std::to_string(order));
}

/// Optimal predictor written directly as polynomials in the white-source
/// process parameters, bypassing CovarianceSeq entirely.  Serves as an
/// independent arithmetic path against optimal_ar1/optimal_ar2 applied to
/// theoretical_covariance; both must agree to floating-point accuracy.
inline ArEstimate closed_form_white(const SystemParams& params, int order) {
    params.validate();
    detail::require_white_sources(params, "closed_form_white");
    const double lambda = params.lambda;
    const double d2 = params.q.variance;
    const double x2 = params.v.variance;
    const double m = params.stationary_mean();
    const double b = 1.0 - lambda * lambda;

    // (1 - lambda^2)-scaled raw second moments as explicit polynomials.
    const double s0 = d2 + b * (x2 + m * m);
    const double s1 = lambda * d2 + b * m * m;
    const double s2 = lambda * lambda * d2 + b * m * m;

    const double psi0 = (d2 + b * x2) / b;
    const double psi1 = lambda * d2 / b;
    const double psi2 = lambda * lambda * d2 / b;

    ArEstimate est;
    est.order = order;
    if (order == 1) {
        if (!(s0 > 0.0)) {
            throw non_identifiable_error(
                "process has zero power; every first-order predictor is "
                "equally optimal");
        }
        const double phi = s1 / s0;
        est.coeffs = {phi};
        est.pred_error_variance = (1.0 + phi * phi) * psi0 - 2.0 * phi * psi1;
    } else if (order == 2) {
        const double gap = s0 - std::abs(s1);
        if (!(s0 > 0.0) || !(gap > 0.0) || (s0 + std::abs(s1)) / gap > 1e12) {
            throw non_identifiable_error(
                "second-order normal matrix is singular or near-singular; the "
                "prediction cost has infinitely many global minima");
        }
        const double det = s0 * s0 - s1 * s1;
        const double phi1 = s1 * (s0 - s2) / det;
        const double phi2 = (s0 * s2 - s1 * s1) / det;
        est.coeffs = {phi1, phi2};
        est.pred_error_variance = (1.0 + phi1 * phi1 + phi2 * phi2) * psi0 +
                                  2.0 * phi1 * (phi2 - 1.0) * psi1 -
                                  2.0 * phi2 * psi2;
    } else {
        throw spec_error("predictor order must be 1 or 2, got " +
                         std::to_string(order));
    }
    return est;
}

/// True when the predictor's characteristic roots lie inside the unit
/// circle (first order: |phi| < 1; second order: the usual triangle).
inline bool is_stable(const ArEstimate& est) {
    if (est.order == 1) return std::abs(est.coeffs[0]) < 1.0;
    const double phi1 = est.coeffs[0];
    const double phi2 = est.coeffs[1];
    return std::abs(phi2) < 1.0 && phi2 + phi1 < 1.0 && phi2 - phi1 < 1.0;
}

} // namespace arident
