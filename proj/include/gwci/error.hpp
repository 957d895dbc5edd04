#pragma once

#include <stdexcept>
#include <string>

namespace gwci {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

struct TruncationError : Error {
    using Error::Error;
};

struct QuadratureError : Error {
    using Error::Error;
};

struct ConstructionError : Error {
    using Error::Error;
};

struct ProfileMismatch : Error {
    using Error::Error;
};

struct RegionMismatch : Error {
    using Error::Error;
};

struct FlatnessError : Error {
    FlatnessError(const std::string& what, double eps) : Error(what), epsilon(eps) {}
    double epsilon;
};

struct ConfigError : Error {
    using Error::Error;
};

struct InvariantError : Error {
    using Error::Error;
};

struct CacheError : Error {
    using Error::Error;
};

} // namespace gwci
