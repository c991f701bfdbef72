// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/error.hpp>

namespace hunkscope {

const char* error_code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MalformedHeader:
        return "MalformedHeader";
    case ErrorCode::CountMismatch:
        return "CountMismatch";
    case ErrorCode::TruncatedHunk:
        return "TruncatedHunk";
    case ErrorCode::SchemaError:
        return "SchemaError";
    case ErrorCode::HunkValidationError:
        return "HunkValidationError";
    case ErrorCode::IoError:
        return "IoError";
    case ErrorCode::InvalidArgument:
        return "InvalidArgument";
    case ErrorCode::NotFound:
        return "NotFound";
    case ErrorCode::RateLimited:
        return "RateLimited";
    case ErrorCode::AuthRequired:
        return "AuthRequired";
    case ErrorCode::OfflineMiss:
        return "OfflineMiss";
    case ErrorCode::NetworkError:
        return "NetworkError";
    case ErrorCode::EmptyTarget:
        return "EmptyTarget";
    case ErrorCode::MismatchedInputs:
        return "MismatchedInputs";
    case ErrorCode::SpawnError:
        return "SpawnError";
    case ErrorCode::NonZeroExit:
        return "NonZeroExit";
    case ErrorCode::Timeout:
        return "Timeout";
    case ErrorCode::ConfigError:
        return "ConfigError";
    case ErrorCode::BindError:
        return "BindError";
    }
    return "Unknown";
}

} // namespace hunkscope
