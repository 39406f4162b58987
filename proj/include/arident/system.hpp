#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arident/errors.hpp"
#include "arident/noise.hpp"

namespace arident {

inline constexpr std::size_t kDefaultBurnIn = 1000;

/// First-order process driven by two independent noise sources:
///
///   y(t) = lambda * y(t-1) + q(t) + v(t) - lambda * v(t-1)
///
/// q is the process input and v the measurement disturbance.  The moving
/// average term -lambda * v(t-1) is what keeps v from being filtered: each
/// v(t) enters exactly one output sample net of the recursion.
struct SystemParams {
    double lambda = 0.0;
    NoiseSpec q;
    NoiseSpec v;

    void validate() const {
        if (!(std::abs(lambda) < 1.0)) {
            throw spec_error("pole must satisfy |lambda| < 1, got " +
                             std::to_string(lambda));
        }
        q.validate();
        v.validate();
        if (v.kind != NoiseKind::White) {
            throw spec_error("measurement noise v must be white");
        }
    }

    // Stationary output mean: v contributes once per sample, q is amplified
    // by the recursion's dc gain 1/(1-lambda).
    double stationary_mean() const {
        return v.mean + q.mean / (1.0 - lambda);
    }
};

/// One simulated realisation plus enough bookkeeping to regenerate it.
struct Trajectory {
    std::vector<double> values;
    SystemParams params;
    SeededStream q_stream;
    SeededStream v_stream;

    std::size_t size() const noexcept { return values.size(); }
};

namespace detail {

inline std::vector<double> draw_source(const NoiseSpec& spec, std::size_t n,
                                       const SeededStream& stream,
                                       std::size_t burn_in) {
    return spec.kind == NoiseKind::White ? sample_white(spec, n, stream)
                                         : sample_colored(spec, n, stream, burn_in);
}

} // namespace detail

/// Simulates n post-burn-in output samples.  The recursion starts from the
/// stationary mean (y = mean, v = v.mean), so burn_in only has to wash out
/// second-order transients.  q and v are drawn from fixed substream lanes of
/// `stream`; the same (params, n, burn_in, stream) always reproduces the
/// same trajectory.
inline Trajectory simulate(const SystemParams& params, std::size_t n,
                           std::size_t burn_in, const SeededStream& stream) {
    params.validate();
    if (n < 3) {
        throw spec_error("trajectory length must be at least 3, got " +
                         std::to_string(n));
    }

    const SeededStream q_stream = stream.substream(lane::system_q);
    const SeededStream v_stream = stream.substream(lane::system_v);
    const std::size_t total = burn_in + n;
    const std::vector<double> q = detail::draw_source(params.q, total, q_stream, burn_in);
    const std::vector<double> v = detail::draw_source(params.v, total, v_stream, burn_in);

    Trajectory traj;
    traj.params = params;
    traj.q_stream = q_stream;
    traj.v_stream = v_stream;
    traj.values.reserve(n);

    double y_prev = params.stationary_mean();
    double v_prev = params.v.mean;
    for (std::size_t t = 0; t < total; ++t) {
        const double y = params.lambda * y_prev + q[t] + v[t] - params.lambda * v_prev;
        if (t >= burn_in) traj.values.push_back(y);
        y_prev = y;
        v_prev = v[t];
    }
    return traj;
}

/// kappa mutually independent realisations.  Batch i uses stream index i
/// under master_seed, so any subset can be regenerated in isolation and
/// results do not depend on scheduling order.
inline std::vector<Trajectory> simulate_batches(const SystemParams& params,
                                                std::size_t n, std::size_t kappa,
                                                std::size_t burn_in,
                                                std::uint64_t master_seed) {
    if (kappa < 1) {
        throw spec_error("batch count must be at least 1");
    }
    std::vector<Trajectory> out;
    out.reserve(kappa);
    for (std::size_t i = 0; i < kappa; ++i) {
        out.push_back(simulate(params, n, burn_in, SeededStream{master_seed, i}));
    }
    return out;
}

} // namespace arident
