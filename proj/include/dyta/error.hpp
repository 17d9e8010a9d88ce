#pragma once

#include <stdexcept>
#include <string>

namespace dyta {

/// Process exit codes shared by the CLI and the error hierarchy below.
enum class ExitCode : int {
    success = 0,
    usage = 1,
    data = 2,
    backend = 3,
    invalid_run = 4,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::usage; }
};

/// Bad configuration, missing files, unusable credentials.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent dataset content.
class DataError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::data; }
};

/// LLM backend exhausted its retries or returned a non-retryable failure.
class BackendError : public Error {
public:
    BackendError(const std::string& what, int status = 0) : Error(what), status_(status) {}
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::backend; }
    [[nodiscard]] int status() const noexcept { return status_; }

private:
    int status_;
};

/// An LLM reply could not be turned into the requested structure.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace dyta
