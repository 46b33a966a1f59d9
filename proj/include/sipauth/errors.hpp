#pragma once

#include <stdexcept>
#include <string>

namespace sipauth {

// Base class for every failure raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameters (kappa/width bounds, slot index out of range, ...).
struct ParamError : Error {
    using Error::Error;
};

// Mismatched lengths between values that must agree (signature vs table,
// malformed bit-string framing, ...).
struct DimensionError : Error {
    using Error::Error;
};

// A garbled word matches neither valid encoding of its wire.
struct TamperDecodeError : Error {
    using Error::Error;
};

// Write attempted on an already-written OTP slot.
struct WriteOnceError : Error {
    using Error::Error;
};

// Read/check of a blank OTP slot.
struct UnprovisionedError : Error {
    using Error::Error;
};

// Operation attempted on a disabled chiplet.
struct DisabledError : Error {
    using Error::Error;
};

// Operation issued out of protocol order (wrong WIR, wrong phase, ...).
struct ProtocolOrderError : Error {
    using Error::Error;
};

// Latency requested for a kappa with no calibration data.
struct CalibrationError : Error {
    using Error::Error;
};

// Message addressed to an unregistered endpoint.
struct RoutingError : Error {
    using Error::Error;
};

// Replay requested for a (channel, seq) never delivered.
struct ReplaySourceError : Error {
    using Error::Error;
};

struct NotEnrolledError : Error {
    using Error::Error;
};

struct AlreadyEnrolledError : Error {
    using Error::Error;
};

// Nonce reuse within one assembly's history.
struct FreshnessError : Error {
    using Error::Error;
};

// OTP store has no blank slot left.
struct CapacityError : Error {
    using Error::Error;
};

// Scenario configuration failed to parse or validate.
struct ConfigError : Error {
    using Error::Error;
};

// Report or transcript output could not be written.
struct IoError : Error {
    using Error::Error;
};

}  // namespace sipauth
