#pragma once

#include <stdexcept>

namespace msm {

// Invalid arguments or out-of-domain parameters.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Unreadable/unwritable files and malformed file structure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inputs that are well-formed but numerically unusable
// (zero variance, too few usable observations, non-positive S_tau^2, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace msm
