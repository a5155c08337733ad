#pragma once

#include <stdexcept>
#include <string>

namespace vvsim {

// Base class for all physics/domain errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A state or operator would need amplitude on a mode outside the OAM truncation.
struct TruncationError : Error {
    using Error::Error;
};

// A ket was constructed from amplitudes that are all (numerically) zero.
struct ZeroVectorError : Error {
    using Error::Error;
};

// Projection onto a logical qubit span left no weight to renormalize.
struct DegenerateProjectionError : Error {
    using Error::Error;
};

// Coincidence post-selection has zero probability.
struct PostSelectionEmptyError : Error {
    using Error::Error;
};

// Invalid numeric parameter (nonpositive duration, rate, ...).
struct ParameterError : Error {
    using Error::Error;
};

// Histogram or count data unusable for estimation.
struct EstimationError : Error {
    using Error::Error;
};

// Measurement set cannot invert (rank-deficient design matrix).
struct CompletenessError : Error {
    using Error::Error;
};

// Mismatched operator/state dimensions.
struct DimensionError : Error {
    using Error::Error;
};

// Missing or malformed configuration entry.
struct ConfigError : Error {
    using Error::Error;
};

// Config/descriptor text failed to parse; carries line/column when known.
struct ParseError : Error {
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line),
          column(column) {}
    explicit ParseError(const std::string& what) : Error(what), line(0), column(0) {}
    int line;
    int column;
};

}  // namespace vvsim
