#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace focusst {

// Natural numbers. Arithmetic never wraps silently: checked_add/checked_mul
// throw, saturating_sub reports the underflow to the caller.
using Nat = std::uint64_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TypeError : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

struct EmptyIntervalError : Error {
    using Error::Error;
};

struct GranularityError : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct OverflowError : Error {
    using Error::Error;
};

struct CausalityCycleError : Error {
    using Error::Error;
};

struct UnknownReferenceError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

inline Nat checked_add(Nat a, Nat b) {
    Nat r = a + b;
    if (r < a)
        throw OverflowError("nat addition overflow: " + std::to_string(a) + " + " + std::to_string(b));
    return r;
}

inline Nat checked_mul(Nat a, Nat b) {
    if (a != 0 && b > UINT64_MAX / a)
        throw OverflowError("nat multiplication overflow: " + std::to_string(a) + " * " + std::to_string(b));
    return a * b;
}

struct SubResult {
    Nat value;
    bool underflowed;
};

// Nat has no negatives; subtraction saturates at 0 and tells the caller.
inline SubResult saturating_sub(Nat a, Nat b) {
    if (b > a)
        return {0, true};
    return {a - b, false};
}

}  // namespace focusst
