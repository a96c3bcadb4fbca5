#pragma once

#include <stdexcept>
#include <string>

namespace flowrep {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedHeader : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct DegenerateComponent : Error {
    using Error::Error;
};

struct NonFiniteLoss : Error {
    using Error::Error;
};

struct NonFiniteScore : Error {
    using Error::Error;
};

struct SingleClass : Error {
    using Error::Error;
};

struct MissingCell : Error {
    using Error::Error;
};

struct InvalidProfile : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ManifestError : Error {
    using Error::Error;
};

}  // namespace flowrep
