#pragma once

#include <stdexcept>
#include <string>

namespace mftraffic {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameter (bad Hurst exponent, SNR <= 0, ...).
struct ParameterError : Error {
    using Error::Error;
};

/// API misuse: incompatible arguments (mismatched lengths, mismatched grids).
struct ContractError : Error {
    using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
struct DomainError : Error {
    using Error::Error;
};

/// Input that makes the operation meaningless (zero-variance series, ...).
struct DegenerateInputError : Error {
    using Error::Error;
};

/// Series too short for the requested scale plan.
struct SizeError : Error {
    using Error::Error;
};

/// File read/write failure; message carries path and, where known, line number.
struct IoError : Error {
    using Error::Error;
};

/// Unexpected internal failure (e.g. embedding retries exhausted).
struct InternalError : Error {
    using Error::Error;
};

}  // namespace mftraffic
