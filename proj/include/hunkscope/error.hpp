// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace hunkscope {

enum class ErrorCode {
    MalformedHeader,
    CountMismatch,
    TruncatedHunk,
    SchemaError,
    HunkValidationError,
    IoError,
    InvalidArgument,
    NotFound,
    RateLimited,
    AuthRequired,
    OfflineMiss,
    NetworkError,
    EmptyTarget,
    MismatchedInputs,
    SpawnError,
    NonZeroExit,
    Timeout,
    ConfigError,
    BindError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message)
        , m_code(code)
    {
    }

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

// Raised by the unified-diff parser. `line` is the 1-based input line the
// problem was detected on.
class DiffError : public Error {
public:
    DiffError(ErrorCode code, std::size_t line, const std::string& message)
        : Error(code, "line " + std::to_string(line) + ": " + message)
        , m_line(line)
    {
    }

    std::size_t line() const noexcept { return m_line; }

private:
    std::size_t m_line;
};

class SchemaError : public Error {
public:
    SchemaError(std::string pointer, const std::string& message)
        : Error(ErrorCode::SchemaError, (pointer.empty() ? std::string("/") : pointer) + ": " + message)
        , m_pointer(std::move(pointer))
    {
    }

    // JSON-pointer style location of the offending value.
    const std::string& pointer() const noexcept { return m_pointer; }

private:
    std::string m_pointer;
};

class FetchError : public Error {
public:
    FetchError(ErrorCode code, const std::string& message, std::optional<std::int64_t> reset_at = std::nullopt)
        : Error(code, message)
        , m_reset_at(reset_at)
    {
    }

    // Epoch seconds at which the platform lifts the rate limit.
    std::optional<std::int64_t> reset_at() const noexcept { return m_reset_at; }

private:
    std::optional<std::int64_t> m_reset_at;
};

class ProcessError : public Error {
public:
    ProcessError(ErrorCode code, const std::string& message, int exit_code = 0, std::string stderr_tail = {})
        : Error(code, message)
        , m_exit_code(exit_code)
        , m_stderr_tail(std::move(stderr_tail))
    {
    }

    int exit_code() const noexcept { return m_exit_code; }
    const std::string& stderr_tail() const noexcept { return m_stderr_tail; }

private:
    int m_exit_code;
    std::string m_stderr_tail;
};

} // namespace hunkscope
