#pragma once

#include <stdexcept>
#include <string>

namespace tcdnpe {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A layer, weight block or batch set does not fit the on-chip memories.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Malformed text or binary input (topologies, parameter files, RLC streams, weight files).
class FormatError : public Error {
public:
    using Error::Error;
};

// An array configuration or schedule that is inconsistent with the problem it is applied to.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace tcdnpe
