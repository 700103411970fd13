#pragma once

// Usage-based spam indicators of a single user's activity log. Every
// indicator is a statistic over unordered comment pairs, computed here from
// class counts in O(n) (O(n log n) for ATDC) instead of enumerating pairs.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>

#include "spamscope/model.hpp"
#include "spamscope/text.hpp"

namespace spamscope {

/// Exact integer pair counts behind crr, vidovp and crav.
struct PairCensus {
    std::uint64_t pairs = 0;
    std::uint64_t same_text = 0;
    std::uint64_t diff_video = 0;
    std::uint64_t same_text_diff_video = 0;

    bool operator==(const PairCensus&) const = default;
};

namespace detail {

constexpr std::uint64_t choose2(std::uint64_t n) noexcept { return n < 2 ? 0 : n * (n - 1) / 2; }

inline double ratio(std::uint64_t num, std::uint64_t den) noexcept {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace detail

inline PairCensus pair_census(const UserActivityLog& log, Normalization mode) {
    struct TextClass {
        std::uint64_t count = 0;
        std::unordered_map<std::string, std::uint64_t> per_video;
    };
    std::unordered_map<std::string, TextClass> by_text;
    std::unordered_map<std::string, std::uint64_t> by_video;

    for (const auto& r : log.records()) {
        auto& cls = by_text[normalize_text(r.text, mode).value()];
        ++cls.count;
        ++cls.per_video[r.video_id];
        ++by_video[r.video_id];
    }

    PairCensus c;
    c.pairs = detail::choose2(log.size());
    std::uint64_t same_video = 0;
    for (const auto& [video, n] : by_video) same_video += detail::choose2(n);
    c.diff_video = c.pairs - same_video;
    for (const auto& [text, cls] : by_text) {
        std::uint64_t same_text_same_video = 0;
        for (const auto& [video, n] : cls.per_video) same_text_same_video += detail::choose2(n);
        c.same_text += detail::choose2(cls.count);
        c.same_text_diff_video += detail::choose2(cls.count) - same_text_same_video;
    }
    return c;
}

/// Mean absolute time difference over all unordered pairs, in seconds.
inline std::optional<double> atdc(const UserActivityLog& log) {
    auto recs = log.records();
    if (recs.size() < 2) return std::nullopt;
    // records are sorted, so each t_j contributes j*t_j minus the prefix sum
    __int128 prefix = 0;
    __int128 total = 0;
    for (std::size_t j = 0; j < recs.size(); ++j) {
        __int128 t = recs[j].timestamp_s;
        total += t * static_cast<__int128>(j) - prefix;
        prefix += t;
    }
    auto pairs = detail::choose2(recs.size());
    return static_cast<double>(static_cast<long double>(total) / static_cast<long double>(pairs));
}

/// Percentage of comments carrying the spam-hint flag; 0 for an empty log.
inline double pchf(const UserActivityLog& log) {
    if (log.empty()) return 0.0;
    std::size_t flagged = 0;
    for (const auto& r : log.records()) flagged += r.has_spam_hint ? 1 : 0;
    return 100.0 * static_cast<double>(flagged) / static_cast<double>(log.size());
}

inline double crr(const UserActivityLog& log, Normalization mode = Normalization::Canonical) {
    auto c = pair_census(log, mode);
    return detail::ratio(c.same_text, c.pairs);
}

inline double vidovp(const UserActivityLog& log) {
    auto c = pair_census(log, Normalization::RawBytes);
    return detail::ratio(c.diff_video, c.pairs);
}

inline double crav(const UserActivityLog& log, Normalization mode = Normalization::Canonical) {
    auto c = pair_census(log, mode);
    return detail::ratio(c.same_text_diff_video, c.pairs);
}

inline FeatureVector feature_vector(const UserActivityLog& log,
                                    Normalization mode = Normalization::Canonical) {
    auto c = pair_census(log, mode);
    FeatureVector fv;
    fv.user_id = log.user_id();
    fv.n_comments = log.size();
    fv.atdc_s = atdc(log);
    fv.pchf_pct = pchf(log);
    fv.crr = detail::ratio(c.same_text, c.pairs);
    fv.vidovp = detail::ratio(c.diff_video, c.pairs);
    fv.crav = detail::ratio(c.same_text_diff_video, c.pairs);
    return fv;
}

} // namespace spamscope
