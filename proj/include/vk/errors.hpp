#pragma once

#include <stdexcept>
#include <string>

namespace vk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// tracker
struct RecursionExhausted : Error {
    using Error::Error;
};
struct DegenerateField : Error {
    using Error::Error;
};
struct TrackingIncomplete : Error {
    using Error::Error;
};
struct NetIdentificationError : Error {
    using Error::Error;
};

// knots
struct DegenerateProjection : Error {
    using Error::Error;
};
struct PersistentDegeneracy : Error {
    using Error::Error;
};
struct InvariantDisagreement : Error {
    using Error::Error;
};

// files
struct FormatError : Error {
    FormatError(const std::string& what, long line)
        : Error(what + (line > 0 ? " (line " + std::to_string(line) + ")" : "")), line(line)
    {
    }
    long line;
};

} // namespace vk
