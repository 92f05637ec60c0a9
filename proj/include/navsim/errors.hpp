#pragma once

#include <stdexcept>
#include <string>

namespace navsim {

// Root of every error thrown by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// State too close to a primary for the potential to be evaluated.
class DegenerateDistance : public Error {
public:
    using Error::Error;
};

// Adaptive integrator could not meet its tolerance at the minimum step.
class StepFailure : public Error {
public:
    using Error::Error;
};

// I - M11*Delta is singular or badly conditioned in an LFT evaluation.
class IllPosed : public Error {
public:
    using Error::Error;
};

class NearCollinear : public Error {
public:
    using Error::Error;
};

class NonPositiveRange : public Error {
public:
    using Error::Error;
};

// H-infinity norm requested for a system whose A matrix is not Hurwitz.
class Unstable : public Error {
public:
    using Error::Error;
};

class NotObservable : public Error {
public:
    using Error::Error;
};

class SynthesisFailed : public Error {
public:
    using Error::Error;
};

// Configuration errors.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ValidationError : public ConfigError {
public:
    ValidationError(std::string field, const std::string& what)
        : ConfigError(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class BoxMismatch : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace navsim
