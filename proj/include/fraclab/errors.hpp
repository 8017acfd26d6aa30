#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fraclab {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameter value (alpha outside (0,2], atom outside the domain, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Vector length or grid mismatch.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Refinement schedule violates ordering or the resolvability rule.
class ScheduleError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

// Measure kind not supported by the requested computation (atoms in Monte Carlo).
class UnsupportedMeasureError : public Error {
public:
    using Error::Error;
};

// Linear algebra failure; carries a reciprocal condition estimate.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double rcond)
        : Error(what), rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

// Iteration budget exhausted. `last_gap` is the last measured gap,
// `trace` the per-level differences when available.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double last_gap,
                        std::vector<double> trace = {})
        : Error(what), last_gap_(last_gap), trace_(std::move(trace)) {}
    double last_gap() const noexcept { return last_gap_; }
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    double last_gap_;
    std::vector<double> trace_;
};

// Configuration parse or validation failure naming the offending key.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace fraclab
