#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spamscope {

enum class ErrorCode {
    EmptyUserId,
    EmptyVideoId,
    NegativeTimestamp,
    BadTimestamp,
    BadBoolean,
    ParseError,
    MixedUsers,
    AllLinesRejected,
    MissingHeader,
    EndpointUnreachable,
    MalformedPage,
    UserNotFound,
    IoError,
    InvalidConfig,
    InvalidSpec,
    Unsupported,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptyUserId: return "EmptyUserId";
    case ErrorCode::EmptyVideoId: return "EmptyVideoId";
    case ErrorCode::NegativeTimestamp: return "NegativeTimestamp";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::BadBoolean: return "BadBoolean";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MixedUsers: return "MixedUsers";
    case ErrorCode::AllLinesRejected: return "AllLinesRejected";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::EndpointUnreachable: return "EndpointUnreachable";
    case ErrorCode::MalformedPage: return "MalformedPage";
    case ErrorCode::UserNotFound: return "UserNotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Unsupported: return "Unsupported";
    }
    return "Unknown";
}

/// Every failure raised by the library. `subject()` names the offending
/// field, key, path, user or page token, depending on the code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string subject, const std::string& detail = {})
        : std::runtime_error(format(code, subject, detail)),
          code_(code),
          subject_(std::move(subject)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    static std::string format(ErrorCode code, const std::string& subject,
                              const std::string& detail) {
        std::string msg(to_string(code));
        if (!subject.empty()) msg += " (" + subject + ")";
        if (!detail.empty()) msg += ": " + detail;
        return msg;
    }

    ErrorCode code_;
    std::string subject_;
};

} // namespace spamscope
