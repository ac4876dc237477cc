#pragma once

#include <stdexcept>
#include <string>

namespace bimod {

// Every hard failure derives from Error so the CLI can attach stage
// context at a single choke point.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Map does not have exactly one decreasing and one increasing branch per period.
struct NotBimodal : Error {
    explicit NotBimodal(const std::string& msg) : Error(msg) {}
};

// Derivative vanishes on an interval wider than the requested tolerance.
struct DegenerateCritical : Error {
    explicit DegenerateCritical(const std::string& msg) : Error(msg) {}
};

// Requested value is not attained on the requested monotone branch.
struct OutOfRange : Error {
    explicit OutOfRange(const std::string& msg) : Error(msg) {}
};

// A continued-fraction endpoint expansion terminated before the endpoints
// disagreed; the bracket cannot certify further quotients.
struct RationalDetected : Error {
    explicit RationalDetected(const std::string& msg) : Error(msg) {}
};

// Forward iterates of a plateau overlapped within tolerance; the order
// comparison is undecidable at this precision.
struct PlateauCollision : Error {
    explicit PlateauCollision(const std::string& msg) : Error(msg) {}
};

// No entry into the target within the iteration cap.
struct NoEntry : Error {
    explicit NoEntry(const std::string& msg) : Error(msg) {}
};

// Adjacent seeds could not be separated into branches within the depth cap.
struct ResolutionTooCoarse : Error {
    explicit ResolutionTooCoarse(const std::string& msg) : Error(msg) {}
};

// Decomposition frame containments failed; caller should raise the base level.
struct FrameInvalid : Error {
    explicit FrameInvalid(const std::string& msg) : Error(msg) {}
};

// Partition coverage below the operator-construction threshold.
struct CoverageTooLow : Error {
    explicit CoverageTooLow(const std::string& msg) : Error(msg) {}
};

// No complete decomposition level is representable at working precision.
struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& msg) : Error(msg) {}
};

// Power iteration failed to converge within the iteration cap.
struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

// Singular-bin quadrature failed to converge under subdivision.
struct IntegrandSingular : Error {
    explicit IntegrandSingular(const std::string& msg) : Error(msg) {}
};

// Malformed or inconsistent run configuration.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace bimod
