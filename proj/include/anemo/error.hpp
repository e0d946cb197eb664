#pragma once

#include <stdexcept>
#include <string>

namespace anemo {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fewer observations than the operation requires.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// Input is structurally valid but statistically degenerate
/// (zero variance, all-tied ranks, constant column, ...).
struct DegenerateDataError : Error {
    using Error::Error;
};

/// Argument outside the mathematical domain (non-finite value,
/// parameter outside the family's range, probability outside (0,1)).
struct DomainError : Error {
    using Error::Error;
};

/// Mismatched lengths / column counts between paired inputs.
struct DimensionError : Error {
    using Error::Error;
};

/// A numerical procedure failed (singular system, optimizer breakdown,
/// non-bracketing root search).
struct NumericalError : Error {
    using Error::Error;
};

}  // namespace anemo
