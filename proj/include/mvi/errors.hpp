#pragma once

#include <stdexcept>
#include <string>

namespace mvi {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto its exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameters, malformed configs, violated preconditions (exit code 2).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A computation could not produce a usable result (exit code 3).
class NumericError : public Error {
public:
    using Error::Error;
};

// File system and format failures (exit code 4).
class IoError : public Error {
public:
    using Error::Error;
};

// Wraps an error with the name of the pipeline stage that raised it.
class StageError : public Error {
public:
    enum class Kind { config, numeric, io };

    StageError(std::string stage, Kind kind, const std::string& what);

    const std::string& stage() const noexcept { return stage_; }
    Kind kind() const noexcept { return kind_; }

private:
    std::string stage_;
    Kind kind_;
};

void require(bool condition, const std::string& message);

} // namespace mvi
