#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arident/errors.hpp"

namespace arident {

enum class NoiseKind { White, ColoredAR1 };

/// Description of a scalar noise source.  White sources are iid Gaussian
/// draws with the given mean and variance.  ColoredAR1 sources are the
/// stationary output of q(t) = ar_coeff * q(t-1) + e(t) with e(t) iid
/// Gaussian of the given variance; their mean must be zero.
struct NoiseSpec {
    double mean = 0.0;
    double variance = 1.0;
    NoiseKind kind = NoiseKind::White;
    double ar_coeff = 0.0; // used only when kind == ColoredAR1

    static NoiseSpec white(double mean, double variance) {
        return NoiseSpec{mean, variance, NoiseKind::White, 0.0};
    }

    static NoiseSpec colored_ar1(double coeff, double innovation_variance) {
        return NoiseSpec{0.0, innovation_variance, NoiseKind::ColoredAR1, coeff};
    }

    void validate() const {
        if (!(variance >= 0.0)) {
            throw spec_error("noise variance must be nonnegative, got " +
                             std::to_string(variance));
        }
        if (kind == NoiseKind::ColoredAR1) {
            if (!(std::abs(ar_coeff) < 1.0)) {
                throw spec_error("colored noise filter is nonstationary: |" +
                                 std::to_string(ar_coeff) + "| >= 1");
            }
            if (mean != 0.0) {
                throw spec_error("colored noise sources are zero-mean; got mean " +
                                 std::to_string(mean));
            }
        }
    }
};

/// Addressable position in a family of independent random streams.  The
/// same (seed, stream_index) pair always yields the same draws; distinct
/// pairs yield statistically independent sequences.  substream() derives
/// further independent streams (e.g. one per noise source) without any
/// coordination between consumers.
struct SeededStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;

    [[nodiscard]] SeededStream substream(std::uint64_t lane) const noexcept;
};

namespace detail {

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t kStreamSalt = 0xa3ec4e6c8a2d1b5full;
inline constexpr std::uint64_t kIndexStep = 0x9e3779b97f4a7c15ull;
inline constexpr std::uint64_t kLaneStep = 0xd1b54a32d192ed03ull;

// Uniform on the open interval (0,1): 53-bit mantissa, never 0 or 1, so
// log() below is always finite.
inline double uniform_open(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

inline SeededStream SeededStream::substream(std::uint64_t lane) const noexcept {
    // Lane derivation and engine seeding use disjoint mixing constants, so a
    // substream never collides with its parent's engine state.
    return SeededStream{detail::mix64(seed + (lane + 1) * detail::kLaneStep),
                        stream_index};
}

inline std::mt19937_64 make_engine(const SeededStream& stream) noexcept {
    std::uint64_t h = detail::mix64(stream.seed ^ detail::kStreamSalt);
    h = detail::mix64(h + stream.stream_index * detail::kIndexStep);
    return std::mt19937_64{h};
}

/// One standard normal draw via Box-Muller.  Hand-rolled (rather than
/// std::normal_distribution) because the library algorithm is
/// implementation-defined, which would break bit-reproducibility of seeded
/// runs across toolchains.
inline double standard_normal(std::mt19937_64& gen) {
    const double u1 = detail::uniform_open(gen);
    const double u2 = detail::uniform_open(gen);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

/// n standard normal draws.  Pairs from each Box-Muller transform are both
/// consumed, so the engine advances by exactly 2*ceil(n/2) variates.
inline std::vector<double> standard_normals(std::mt19937_64& gen, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        const double u1 = detail::uniform_open(gen);
        const double u2 = detail::uniform_open(gen);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
        out.push_back(r * std::cos(a));
        if (out.size() < n) out.push_back(r * std::sin(a));
    }
    return out;
}

/// n iid draws from a white source.  Zero variance is legal and yields the
/// constant mean sequence.
inline std::vector<double> sample_white(const NoiseSpec& spec, std::size_t n,
                                        const SeededStream& stream) {
    spec.validate();
    if (spec.kind != NoiseKind::White) {
        throw spec_error("sample_white requires a white noise spec");
    }
    if (n == 0) {
        throw spec_error("sample length must be positive");
    }
    auto gen = make_engine(stream);
    std::vector<double> out = standard_normals(gen, n);
    const double sd = std::sqrt(spec.variance);
    for (double& x : out) x = spec.mean + sd * x;
    return out;
}

namespace lane {
// Named substream lanes.  colored_init seeds the stationary starting value
// of a colored source; system_q / system_v are the two inputs of the
// simulated process.  Keeping the init draw on its own lane makes a colored
// source with ar_coeff == 0 emit the same sequence as a white source on the
// same stream.
inline constexpr std::uint64_t colored_init = 0;
inline constexpr std::uint64_t system_q = 1;
inline constexpr std::uint64_t system_v = 2;
} // namespace lane

/// n consecutive draws from a stationary colored (AR(1)-filtered) source.
/// The recursion starts from an exact stationary draw and then discards
/// burn_in further samples, so the output is stationary for any burn_in,
/// including zero.
inline std::vector<double> sample_colored(const NoiseSpec& spec, std::size_t n,
                                          const SeededStream& stream,
                                          std::size_t burn_in = 0) {
    spec.validate();
    if (spec.kind != NoiseKind::ColoredAR1) {
        throw spec_error("sample_colored requires a colored noise spec");
    }
    if (n == 0) {
        throw spec_error("sample length must be positive");
    }
    const double a = spec.ar_coeff;
    const double sd = std::sqrt(spec.variance);

    double q = 0.0;
    {
        auto init_gen = make_engine(stream.substream(lane::colored_init));
        const double stationary_sd = sd / std::sqrt(1.0 - a * a);
        q = stationary_sd * standard_normal(init_gen);
    }

    auto gen = make_engine(stream);
    const std::vector<double> z = standard_normals(gen, burn_in + n);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t t = 0; t < z.size(); ++t) {
        q = a * q + sd * z[t];
        if (t >= burn_in) out.push_back(q);
    }
    return out;
}

} // namespace arident
