#pragma once

#include <stdexcept>
#include <string>

namespace driftmeter {

// Base of all library errors. The leading token of the message is a stable
// short code (e.g. "empty-track: ..."), which the CLI surfaces verbatim.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unusable input data (bad WAV/CSV, empty track, ...).
// Mapped to exit code 3 by the CLI.
class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

// Invalid argument or configuration value. Mapped to exit code 2.
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

// The analysis itself cannot proceed (no peaks, degenerate regression, ...).
// Mapped to exit code 4.
class AnalysisError : public Error {
public:
    explicit AnalysisError(const std::string& msg) : Error(msg) {}
};

} // namespace driftmeter
