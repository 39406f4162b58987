#pragma once

#include <charconv>
#include <cstddef>
#include <ostream>
#include <string>
#include <system_error>

#include "arident/least_squares.hpp"
#include "arident/moments.hpp"
#include "arident/system.hpp"

namespace arident {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double x) {
    char buf[32];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,y\n";
    for (std::size_t t = 0; t < traj.values.size(); ++t) {
        os << (t + 1) << ',' << format_double(traj.values[t]) << '\n';
    }
}

inline void write_covariance_csv(std::ostream& os, const CovarianceSeq& cov) {
    os << "tau,psi\n";
    for (std::size_t tau = 0; tau < cov.values.size(); ++tau) {
        os << tau << ',' << format_double(cov.values[tau]) << '\n';
    }
}

inline void write_batches_csv(std::ostream& os, const BatchSummary& summary) {
    os << (summary.order == 2 ? "batch_index,phi1,phi2" : "batch_index,phi1") << '\n';
    for (std::size_t i = 0; i < summary.estimates.size(); ++i) {
        os << i << ',' << format_double(summary.estimates[i].coeffs[0]);
        if (summary.order == 2) {
            os << ',' << format_double(summary.estimates[i].coeffs[1]);
        }
        os << '\n';
    }
}

/// Running mean and variance of the estimates over the first k batches,
/// k = 1..kappa.  The last row reproduces the summary statistics exactly:
/// both are computed by the same index-ordered reduction.
inline void write_series_csv(std::ostream& os, const BatchSummary& summary) {
    if (summary.order == 2) {
        os << "batch,phi1,phi2,running_mean1,running_mean2,running_var1,running_var2\n";
    } else {
        os << "batch,phi1,running_mean1,running_var1\n";
    }
    const std::size_t p = static_cast<std::size_t>(summary.order);
    for (std::size_t k = 1; k <= summary.estimates.size(); ++k) {
        const std::vector<double> mean =
            coefficient_mean(summary.estimates, k, summary.order);
        const Mat2 var =
            coefficient_variance(summary.estimates, k, summary.order, mean);
        os << k;
        for (std::size_t j = 0; j < p; ++j) {
            os << ',' << format_double(summary.estimates[k - 1].coeffs[j]);
        }
        for (std::size_t j = 0; j < p; ++j) os << ',' << format_double(mean[j]);
        for (std::size_t j = 0; j < p; ++j) os << ',' << format_double(var[j][j]);
        os << '\n';
    }
}

} // namespace arident
