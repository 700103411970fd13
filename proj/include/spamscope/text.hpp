#pragma once

// Comment-text canonicalization used by the exact-match indicators.

#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "spamscope/error.hpp"

namespace spamscope {

enum class Normalization {
    Canonical, // NFC, trimmed, whitespace runs collapsed to one space; case kept
    RawBytes,  // identity
};

constexpr std::string_view to_string(Normalization m) noexcept {
    return m == Normalization::Canonical ? "canonical" : "raw-bytes";
}

/// Strong type for text that has gone through `normalize_text`.
class NormalizedText {
public:
    NormalizedText() = default;

    const std::string& value() const noexcept { return value_; }

    bool operator==(const NormalizedText&) const = default;
    auto operator<=>(const NormalizedText&) const = default;

private:
    friend NormalizedText normalize_text(std::string_view, Normalization);
    explicit NormalizedText(std::string v) : value_(std::move(v)) {}

    std::string value_;
};

inline NormalizedText normalize_text(std::string_view raw, Normalization mode) {
    if (mode == Normalization::RawBytes) return NormalizedText(std::string(raw));

    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error(ErrorCode::Unsupported, "icu", u_errorName(status));

    icu::UnicodeString src = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    icu::UnicodeString composed = nfc->normalize(src, status);
    if (U_FAILURE(status)) throw Error(ErrorCode::Unsupported, "icu", u_errorName(status));

    icu::UnicodeString out;
    bool pending_space = false;
    for (int32_t i = 0; i < composed.length();) {
        UChar32 c = composed.char32At(i);
        i += U16_LENGTH(c);
        if (u_isUWhiteSpace(c)) {
            pending_space = !out.isEmpty();
            continue;
        }
        if (pending_space) {
            out.append(static_cast<UChar>(u' '));
            pending_space = false;
        }
        out.append(c);
    }
    std::string utf8;
    out.toUTF8String(utf8);
    return NormalizedText(std::move(utf8));
}

} // namespace spamscope
