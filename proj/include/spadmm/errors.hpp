#pragma once

#include <stdexcept>
#include <string>

namespace spadmm {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};
struct NotPositiveDefinite : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct BadParameter : Error {
    using Error::Error;
};
struct BadLambda : Error {
    using Error::Error;
};
struct BadHorizon : Error {
    using Error::Error;
};
struct TauOutOfRange : Error {
    using Error::Error;
};
struct PointOutsideDomain : Error {
    using Error::Error;
};
struct SubproblemNotSolvable : Error {
    using Error::Error;
};
struct MissingSolution : Error {
    using Error::Error;
};
struct ResampleExhausted : Error {
    using Error::Error;
};
struct IndexGap : Error {
    using Error::Error;
};
struct EmptyAccumulator : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct MalformedCsv : Error {
    using Error::Error;
};

}  // namespace spadmm
