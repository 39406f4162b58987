#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "arident/ar.hpp"
#include "arident/errors.hpp"
#include "arident/system.hpp"

namespace arident {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Linear regression y(t) on its own past, t running over every sample
/// with a full history.  regressors[k] = {y(t-1), y(t-2)}; the second slot
/// is zero for first-order problems.
struct RegressionProblem {
    int order = 1;
    std::vector<double> targets;
    std::vector<std::array<double, 2>> regressors;
};

inline RegressionProblem build_problem(const Trajectory& traj, int order) {
    if (order != 1 && order != 2) {
        throw spec_error("predictor order must be 1 or 2, got " +
                         std::to_string(order));
    }
    const std::vector<double>& y = traj.values;
    const std::size_t p = static_cast<std::size_t>(order);
    if (y.size() < p + 1) {
        throw spec_error("trajectory too short for order " + std::to_string(order) +
                         ": need at least " + std::to_string(p + 1) +
                         " samples, got " + std::to_string(y.size()));
    }
    RegressionProblem prob;
    prob.order = order;
    prob.targets.reserve(y.size() - p);
    prob.regressors.reserve(y.size() - p);
    for (std::size_t t = p; t < y.size(); ++t) {
        prob.targets.push_back(y[t]);
        prob.regressors.push_back({y[t - 1], order == 2 ? y[t - 2] : 0.0});
    }
    return prob;
}

/// Ordinary least squares through the normal equations.  Sums accumulate
/// in sample order, so the result is bit-reproducible for a given problem.
inline ArEstimate ls_fit(const RegressionProblem& prob) {
    if (prob.targets.empty() || prob.targets.size() != prob.regressors.size()) {
        throw spec_error("regression problem is empty or inconsistent");
    }
    ArEstimate est;
    est.order = prob.order;
    if (prob.order == 1) {
        double sxx = 0.0;
        double sxy = 0.0;
        for (std::size_t k = 0; k < prob.targets.size(); ++k) {
            const double x = prob.regressors[k][0];
            sxx += x * x;
            sxy += x * prob.targets[k];
        }
        if (!(sxx > 0.0)) {
            throw non_identifiable_error(
                "all regressors are zero; the squared-error cost has "
                "infinitely many global minima");
        }
        est.coeffs = {sxy / sxx};
        return est;
    }

    double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t k = 0; k < prob.targets.size(); ++k) {
        const double x1 = prob.regressors[k][0];
        const double x2 = prob.regressors[k][1];
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * prob.targets[k];
        b2 += x2 * prob.targets[k];
    }
    // Symmetric 2x2 eigenvalues, for an explicit conditioning check.
    const double mean_diag = 0.5 * (s11 + s22);
    const double radius = std::sqrt(0.25 * (s11 - s22) * (s11 - s22) + s12 * s12);
    const double eig_min = mean_diag - radius;
    const double eig_max = mean_diag + radius;
    if (!(eig_min > 0.0) || eig_max / eig_min > 1e12) {
        throw non_identifiable_error(
            "normal matrix is singular or near-singular (condition > 1e12); "
            "the squared-error cost has infinitely many global minima");
    }
    const double det = s11 * s22 - s12 * s12;
    est.coeffs = {(b1 * s22 - s12 * b2) / det, (s11 * b2 - s12 * b1) / det};
    return est;
}

/// Fit residuals in sample order.
inline std::vector<double> residuals(const RegressionProblem& prob,
                                     const ArEstimate& est) {
    std::vector<double> res;
    res.reserve(prob.targets.size());
    for (std::size_t k = 0; k < prob.targets.size(); ++k) {
        double pred = 0.0;
        for (int j = 0; j < est.order; ++j) {
            pred += est.coeffs[static_cast<std::size_t>(j)] * prob.regressors[k][static_cast<std::size_t>(j)];
        }
        res.push_back(prob.targets[k] - pred);
    }
    return res;
}

/// Mean of the first `count` estimates, one entry per coefficient.
inline std::vector<double> coefficient_mean(const std::vector<ArEstimate>& estimates,
                                            std::size_t count, int order) {
    if (count == 0 || count > estimates.size()) {
        throw spec_error("coefficient_mean: count out of range");
    }
    std::vector<double> mean(static_cast<std::size_t>(order), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < mean.size(); ++j) {
            mean[j] += estimates[i].coeffs[j];
        }
    }
    for (double& m : mean) m /= static_cast<double>(count);
    return mean;
}

/// Scatter of the first `count` estimates about `mean`, normalised by
/// count (not count - 1): the empirical covariance definition used
/// throughout, slightly biased but matching the reported statistics.
inline Mat2 coefficient_variance(const std::vector<ArEstimate>& estimates,
                                 std::size_t count, int order,
                                 const std::vector<double>& mean) {
    if (count == 0 || count > estimates.size()) {
        throw spec_error("coefficient_variance: count out of range");
    }
    Mat2 var{{{0.0, 0.0}, {0.0, 0.0}}};
    const std::size_t p = static_cast<std::size_t>(order);
    for (std::size_t i = 0; i < count; ++i) {
        std::array<double, 2> d{0.0, 0.0};
        for (std::size_t j = 0; j < p; ++j) d[j] = estimates[i].coeffs[j] - mean[j];
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < p; ++k) {
                var[j][k] += d[j] * d[k];
            }
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < p; ++k) {
            var[j][k] /= static_cast<double>(count);
        }
    }
    return var;
}

/// Per-batch estimates plus their empirical mean and covariance.
struct BatchSummary {
    int order = 1;
    std::size_t kappa = 0;
    std::size_t n = 0;
    std::vector<ArEstimate> estimates;
    std::vector<double> emp_mean;
    Mat2 emp_variance{{{0.0, 0.0}, {0.0, 0.0}}};
};

inline BatchSummary summarize(std::vector<ArEstimate> estimates, int order,
                              std::size_t n) {
    if (estimates.empty()) {
        throw spec_error("summarize needs at least one estimate");
    }
    BatchSummary summary;
    summary.order = order;
    summary.kappa = estimates.size();
    summary.n = n;
    summary.estimates = std::move(estimates);
    summary.emp_mean = coefficient_mean(summary.estimates, summary.kappa, order);
    summary.emp_variance = coefficient_variance(summary.estimates, summary.kappa,
                                                order, summary.emp_mean);
    return summary;
}

/// Simulates kappa independent batches of length n, fits each one, and
/// summarises the estimates.  Batches are distributed over worker threads;
/// every batch derives its randomness from (master_seed, batch index) and
/// the summary reduction runs serially in index order, so the result is
/// bit-identical for any thread count.  If any batch fails to fit, the
/// failure with the lowest batch index is reported.
inline BatchSummary batch_estimate(const SystemParams& params, int order,
                                   std::size_t n, std::size_t kappa,
                                   std::uint64_t master_seed,
                                   std::size_t burn_in = kDefaultBurnIn,
                                   unsigned threads = 0) {
    params.validate();
    if (order != 1 && order != 2) {
        throw spec_error("predictor order must be 1 or 2, got " +
                         std::to_string(order));
    }
    if (n < 3) {
        throw spec_error("batch length must be at least 3, got " + std::to_string(n));
    }
    if (kappa < 2) {
        throw spec_error("batch statistics need kappa >= 2, got " +
                         std::to_string(kappa));
    }

    unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > kappa) workers = static_cast<unsigned>(kappa);

    std::vector<ArEstimate> estimates(kappa);
    std::mutex failure_mutex;
    std::size_t failed_index = kappa;
    std::string failure_message;

    auto run_range = [&](unsigned w) {
        for (std::size_t i = w; i < kappa; i += workers) {
            try {
                const Trajectory traj =
                    simulate(params, n, burn_in, SeededStream{master_seed, i});
                estimates[i] = ls_fit(build_problem(traj, order));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure_message = e.what();
                }
            }
        }
    };

    if (workers == 1) {
        run_range(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_range, w);
        for (std::thread& t : pool) t.join();
    }

    if (failed_index < kappa) {
        throw non_identifiable_error("batch " + std::to_string(failed_index) +
                                     ": " + failure_message);
    }
    return summarize(std::move(estimates), order, n);
}

} // namespace arident
