#pragma once

#include <stdexcept>

namespace arident {

/// Invalid parameters or an unsupported scenario: negative variance,
/// nonstationary pole or filter coefficient, too-short data, degenerate
/// (zero-power) processes.
struct spec_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Singular or ill-conditioned normal equations: the quadratic cost has
/// infinitely many global minima and no unique estimate exists.
struct non_identifiable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace arident
