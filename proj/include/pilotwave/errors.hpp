#pragma once

#include <stdexcept>
#include <string>

namespace pilotwave {

// Error taxonomy used across the library. Every failure mode callers are
// expected to handle has its own type; everything derives from Error so the
// CLI can catch one base and emit a machine-readable record.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : Error {
    using Error::Error;
};
struct ShapeError : Error {
    using Error::Error;
};
struct ConfigurationError : Error {
    using Error::Error;
};
struct StepSizeError : Error {
    using Error::Error;
};
struct SamplerEfficiencyError : Error {
    using Error::Error;
};
struct NodeError : Error {
    using Error::Error;
};
struct SchemaError : Error {
    using Error::Error;
};
struct SemanticError : Error {
    using Error::Error;
};
// Raised when pointer packets fail the localization tolerance.
struct DeviceNoGoodError : Error {
    using Error::Error;
};
struct PresetViolationError : Error {
    using Error::Error;
};
struct UndefinedConditionalError : Error {
    using Error::Error;
};

}  // namespace pilotwave
