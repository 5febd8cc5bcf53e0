#pragma once

#include <stdexcept>
#include <string>

namespace qcf {

// Invalid inputs (bad axis norms, malformed segments, bad config values).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not meet its accuracy contract.
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepSizeError : NumericsError {
    using NumericsError::NumericsError;
};

struct RefinementError : NumericsError {
    using NumericsError::NumericsError;
};

struct FitError : NumericsError {
    using NumericsError::NumericsError;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qcf
