#ifndef EMCERT_ERRORS_HPP
#define EMCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace emcert {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitianError : Error {
    using Error::Error;
};

struct WrongDimensionError : Error {
    using Error::Error;
};

struct NotPsdError : Error {
    using Error::Error;
};

struct ZeroEffectError : Error {
    using Error::Error;
};

struct VisibilityOutOfRangeError : Error {
    using Error::Error;
};

struct InvalidAssemblyError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

struct UnnormalizedTableError : Error {
    using Error::Error;
};

struct BudgetExceededError : Error {
    using Error::Error;
};

struct RatioOutOfRangeError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

}  // namespace emcert

#endif
