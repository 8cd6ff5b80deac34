#ifndef MDLAB_ERRORS_HPP
#define MDLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mdlab {

// Base class for all library errors. Subclasses carry the contract name of
// the violated precondition so callers (and tests) can catch them precisely.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- probability tables ------------------------------------------------------
struct NegativeMass : Error {
    using Error::Error;
};
struct NotNormalized : Error {
    using Error::Error;
};
struct ShapeMismatch : Error {
    using Error::Error;
};
struct UnknownVariable : Error {
    using Error::Error;
};
struct OverlappingSets : Error {
    using Error::Error;
};
struct AlphabetTooLarge : Error {
    using Error::Error;
};

// -- scalar ranges and word lengths ------------------------------------------
struct OutOfRange : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};

// -- linear codes --------------------------------------------------------------
struct TooLargeForExhaustive : Error {
    using Error::Error;
};
struct InvalidDimensions : Error {
    using Error::Error;
};

// -- distortion tables ---------------------------------------------------------
struct DegenerateDelta : Error {
    using Error::Error;
};

// -- inequality systems --------------------------------------------------------
struct LayoutMismatch : Error {
    using Error::Error;
};
struct MissingSumVariable : Error {
    using Error::Error;
};
struct QTooSmall : Error {
    using Error::Error;
};
struct Blowup : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};

}  // namespace mdlab

#endif
