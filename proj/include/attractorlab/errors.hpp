#pragma once

#include <stdexcept>
#include <string>

namespace attractorlab {

// Invalid configuration values or unparsable inputs.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fields or staggered fields that do not live on the same grid.
struct ShapeError : ConfigError {
    explicit ShapeError(const std::string& msg) : ConfigError(msg) {}
};

// Grid too coarse for the requested quantity (e.g. unit windows with h > 1).
struct ResolutionError : ConfigError {
    explicit ResolutionError(const std::string& msg) : ConfigError(msg) {}
};

// A structural hypothesis of the problem class is violated (named in the message).
struct HypothesisError : std::runtime_error {
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver breakdown: non-convergence, NaN/Inf, blow-up.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A verification check failed; message carries the witness.
struct CheckError : std::runtime_error {
    explicit CheckError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace attractorlab
