#pragma once

// Shared helpers for the test suites: sample statistics, the parameter grid
// exercised by the consistency properties, and slow reference oracles that
// recompute closed-form results a different way.

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "arident/moments.hpp"
#include "arident/noise.hpp"
#include "arident/system.hpp"

namespace testutil {

inline double sample_mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double sample_autocov(std::span<const double> x, std::size_t lag) {
    const double m = sample_mean(x);
    double s = 0.0;
    for (std::size_t t = lag; t < x.size(); ++t) {
        s += (x[t] - m) * (x[t - lag] - m);
    }
    return s / static_cast<double>(x.size());
}

inline double sample_variance(std::span<const double> x) {
    return sample_autocov(x, 0);
}

struct GridPoint {
    double lambda;
    double delta2;
    double xi2;
};

/// 7 poles x 6 variance pairs = 42 parameter combinations, spanning sign,
/// magnitude, and the degenerate pole 0.
inline std::vector<GridPoint> parameter_grid() {
    const double lambdas[] = {-0.9, -0.5, -1.0 / 3.0, 0.0, 1.0 / 3.0, 0.5, 0.9};
    const std::pair<double, double> variance_pairs[] = {
        {0.5, 1.0}, {0.5, 4.0}, {0.5, 9.0}, {1.0, 4.0}, {1.0, 9.0}, {4.0, 9.0}};
    std::vector<GridPoint> grid;
    grid.reserve(42);
    for (double lambda : lambdas) {
        for (const auto& [delta2, xi2] : variance_pairs) {
            grid.push_back({lambda, delta2, xi2});
        }
    }
    return grid;
}

inline arident::SystemParams white_params(double lambda, double delta2, double xi2,
                                          double qbar = 0.0, double vbar = 0.0) {
    arident::SystemParams params;
    params.lambda = lambda;
    params.q = arident::NoiseSpec::white(qbar, delta2);
    params.v = arident::NoiseSpec::white(vbar, xi2);
    return params;
}

inline arident::SystemParams colored_params(double lambda, double coeff,
                                            double innovation_variance, double xi2) {
    arident::SystemParams params;
    params.lambda = lambda;
    params.q = arident::NoiseSpec::colored_ar1(coeff, innovation_variance);
    params.v = arident::NoiseSpec::white(0.0, xi2);
    return params;
}

/// Brute-force reference for the filtered-input autocovariance: expands the
/// output as a double moving-average series over the colored input,
/// Psi_x(tau) = sum_{k,l} lambda^{k+l} Psi_q(|tau + l - k|), truncated once
/// the geometric factors are negligible.
inline double colored_psi_by_series(double lambda, double coeff,
                                    double innovation_variance, std::size_t tau,
                                    std::size_t terms = 400) {
    const double var_q = innovation_variance / (1.0 - coeff * coeff);
    double sum = 0.0;
    double lk = 1.0;
    for (std::size_t k = 0; k < terms; ++k) {
        double lkl = lk;
        for (std::size_t l = 0; l < terms; ++l) {
            const double diff = static_cast<double>(tau) + static_cast<double>(l) -
                                static_cast<double>(k);
            sum += lkl * var_q * std::pow(coeff, std::abs(diff));
            lkl *= lambda;
        }
        lk *= lambda;
    }
    return sum;
}

/// Derivative-free reference minimiser of the first-order prediction cost:
/// repeated grid refinement over phi in (-1, 1), accurate to ~1e-9.
inline double minimize_cost_ar1(const arident::CovarianceSeq& cov) {
    const double psi0 = cov.values[0];
    const double psi1 = cov.values[1];
    const double m2 = cov.mean * cov.mean;
    auto cost = [&](double phi) {
        return (1.0 + phi * phi) * psi0 - 2.0 * phi * psi1 +
               (1.0 - phi) * (1.0 - phi) * m2;
    };
    double lo = -0.999999;
    double hi = 0.999999;
    double best = 0.0;
    for (int round = 0; round < 8; ++round) {
        const int points = 2000;
        double best_cost = cost(lo);
        best = lo;
        for (int i = 1; i <= points; ++i) {
            const double phi = lo + (hi - lo) * static_cast<double>(i) /
                                        static_cast<double>(points);
            const double c = cost(phi);
            if (c < best_cost) {
                best_cost = c;
                best = phi;
            }
        }
        const double step = (hi - lo) / static_cast<double>(points);
        lo = best - 2.0 * step;
        hi = best + 2.0 * step;
    }
    return best;
}

} // namespace testutil
