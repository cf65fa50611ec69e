#pragma once

#include <stdexcept>
#include <string>

namespace hsmff {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration file / parameter validation failure (CLI exit code 1).
struct ConfigError : Error { using Error::Error; };

// Motion limits are not strictly positive.
struct InvalidLimits : Error { using Error::Error; };

// Plant state became non-finite during integration (unstable gains or
// too-coarse substeps; CLI exit code 2).
struct NonFiniteState : Error { using Error::Error; };

// Trace too short to build a single full regressor window.
struct TraceTooShort : Error { using Error::Error; };

// Gram matrix of the physical regression is singular (unexciting data).
struct RankDeficient : Error { using Error::Error; };

// Training loss left the finite range (step size too large).
struct DivergedLoss : Error { using Error::Error; };

// Feedforward asked for a sample index outside the reference profile.
struct LookaheadUnavailable : Error { using Error::Error; };

// Metric requested on an empty trace.
struct EmptyTrace : Error { using Error::Error; };

// File could not be read or written.
struct IoError : Error { using Error::Error; };

} // namespace hsmff
