#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "spamscope/error.hpp"
#include "spamscope/timestamp.hpp"

namespace spamscope {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// One comment event from a user's activity log.
struct CommentRecord {
    std::string user_id;
    std::optional<std::string> comment_id;
    std::string video_id;
    std::int64_t timestamp_s = 0;
    std::string text;
    bool has_spam_hint = false;

    bool operator==(const CommentRecord&) const = default;
};

namespace detail {

inline std::string_view trim_ascii(std::string_view s) {
    constexpr std::string_view ws = " \t\n\r\f\v";
    auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

} // namespace detail

/// Trims user_id/video_id and checks the record invariants.
inline CommentRecord validate_record(CommentRecord raw) {
    raw.user_id = std::string(detail::trim_ascii(raw.user_id));
    raw.video_id = std::string(detail::trim_ascii(raw.video_id));
    if (raw.user_id.empty()) throw Error(ErrorCode::EmptyUserId, "user_id");
    if (raw.video_id.empty()) throw Error(ErrorCode::EmptyVideoId, "video_id");
    if (raw.timestamp_s < 0)
        throw Error(ErrorCode::NegativeTimestamp, "timestamp_s", std::to_string(raw.timestamp_s));
    return raw;
}

/// The timestamp-ordered comment history of one user. Only `build_log`
/// constructs non-empty logs, so every instance satisfies the ordering and
/// single-owner invariants.
class UserActivityLog {
public:
    UserActivityLog() = default;

    const std::string& user_id() const noexcept { return user_id_; }
    std::span<const CommentRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    bool operator==(const UserActivityLog&) const = default;

private:
    friend UserActivityLog build_log(std::string_view, std::vector<CommentRecord>);

    UserActivityLog(std::string user, std::vector<CommentRecord> records)
        : user_id_(std::move(user)), records_(std::move(records)) {}

    std::string user_id_;
    std::vector<CommentRecord> records_;
};

/// Validates, drops repeated comment_ids (first occurrence wins) and sorts by
/// (timestamp, comment_id) keeping input order among exact ties. Records
/// without a comment_id order before those with one at the same second.
inline UserActivityLog build_log(std::string_view user_id, std::vector<CommentRecord> records) {
    std::string owner(detail::trim_ascii(user_id));
    if (owner.empty()) throw Error(ErrorCode::EmptyUserId, "user_id");

    std::vector<CommentRecord> kept;
    kept.reserve(records.size());
    std::unordered_set<std::string> seen_ids;
    for (auto& r : records) {
        CommentRecord rec = validate_record(std::move(r));
        if (rec.user_id != owner)
            throw Error(ErrorCode::MixedUsers, rec.user_id, "record does not belong to " + owner);
        if (rec.comment_id && !seen_ids.insert(*rec.comment_id).second) continue;
        kept.push_back(std::move(rec));
    }
    std::stable_sort(kept.begin(), kept.end(), [](const CommentRecord& a, const CommentRecord& b) {
        if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
        return a.comment_id < b.comment_id;
    });
    return UserActivityLog(std::move(owner), std::move(kept));
}

struct FeatureVector {
    std::string user_id;
    std::size_t n_comments = 0;
    std::optional<double> atdc_s;
    double pchf_pct = 0.0;
    double crr = 0.0; // also the rule's COMOVP
    double vidovp = 0.0;
    double crav = 0.0;

    double comovp() const noexcept { return crr; }

    bool operator==(const FeatureVector&) const = default;
};

enum class Indicator { PCHF, ATDC, COMOVP, VIDOVP };

inline constexpr Indicator kAllIndicators[] = {Indicator::PCHF, Indicator::ATDC, Indicator::COMOVP,
                                               Indicator::VIDOVP};

constexpr std::string_view to_string(Indicator i) noexcept {
    switch (i) {
    case Indicator::PCHF: return "PCHF";
    case Indicator::ATDC: return "ATDC";
    case Indicator::COMOVP: return "COMOVP";
    case Indicator::VIDOVP: return "VIDOVP";
    }
    return "?";
}

inline std::optional<Indicator> indicator_from_string(std::string_view s) {
    for (Indicator i : kAllIndicators)
        if (to_string(i) == s) return i;
    return std::nullopt;
}

enum class Label { Spammer, Legit, Insufficient };

constexpr std::string_view to_string(Label l) noexcept {
    switch (l) {
    case Label::Spammer: return "spammer";
    case Label::Legit: return "legit";
    case Label::Insufficient: return "insufficient";
    }
    return "?";
}

inline std::optional<Label> label_from_string(std::string_view s) {
    for (Label l : {Label::Spammer, Label::Legit, Label::Insufficient})
        if (to_string(l) == s) return l;
    return std::nullopt;
}

enum class Combine { Or };

/// Thresholds of the spammer rule. Defaults are the published values.
struct RuleConfig {
    std::size_t min_comments = 5; // rule applies when n_comments > min_comments
    double pchf_gt = 70.0;
    double atdc_lt_s = 150.0;
    double comovp_gt = 0.60;
    double vidovp_gt = 0.60;
    Combine combine = Combine::Or;

    void validate() const {
        if (min_comments < 1) throw Error(ErrorCode::InvalidConfig, "min_comments", "must be positive");
        auto finite = [](double v, const char* key) {
            if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, key, "must be finite");
        };
        finite(pchf_gt, "pchf_gt");
        finite(atdc_lt_s, "atdc_lt_s");
        finite(comovp_gt, "comovp_gt");
        finite(vidovp_gt, "vidovp_gt");
        if (pchf_gt < 0 || pchf_gt > 100) throw Error(ErrorCode::InvalidConfig, "pchf_gt", "outside [0,100]");
        if (comovp_gt < 0 || comovp_gt > 1) throw Error(ErrorCode::InvalidConfig, "comovp_gt", "outside [0,1]");
        if (vidovp_gt < 0 || vidovp_gt > 1) throw Error(ErrorCode::InvalidConfig, "vidovp_gt", "outside [0,1]");
    }

    bool operator==(const RuleConfig&) const = default;
};

struct Verdict {
    std::string user_id;
    Label label = Label::Insufficient;
    std::vector<Indicator> triggered; // in kAllIndicators order, no repeats
    FeatureVector features;

    bool fired(Indicator i) const {
        return std::find(triggered.begin(), triggered.end(), i) != triggered.end();
    }

    bool operator==(const Verdict&) const = default;
};

// ---------------------------------------------------------------------------
// JSON shapes

inline ordered_json to_json(const CommentRecord& r) {
    ordered_json j;
    j["user_id"] = r.user_id;
    if (r.comment_id) j["comment_id"] = *r.comment_id;
    j["video_id"] = r.video_id;
    j["published_at"] = format_rfc3339(r.timestamp_s);
    j["text"] = r.text;
    j["has_spam_hint"] = r.has_spam_hint;
    return j;
}

/// One canonical JSON line, no trailing newline.
inline std::string to_json_line(const CommentRecord& r) {
    return to_json(r).dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace detail {

template <typename J>
const std::string& require_string(const J& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(ErrorCode::ParseError, key, "missing field");
    if (!it->is_string()) throw Error(ErrorCode::ParseError, key, "expected string");
    return it->template get_ref<const std::string&>();
}

} // namespace detail

/// Reads the canonical shape and validates it. has_spam_hint and comment_id
/// are optional; other keys are ignored.
template <typename J>
CommentRecord record_from_json(const J& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "", "expected JSON object");
    CommentRecord r;
    r.user_id = detail::require_string(j, "user_id");
    r.video_id = detail::require_string(j, "video_id");
    const std::string& published = detail::require_string(j, "published_at");
    auto ts = parse_rfc3339(published);
    if (!ts) throw Error(ErrorCode::BadTimestamp, "published_at", published);
    r.timestamp_s = *ts;
    if (auto it = j.find("text"); it != j.end()) {
        if (!it->is_string()) throw Error(ErrorCode::ParseError, "text", "expected string");
        r.text = it->template get<std::string>();
    } else {
        throw Error(ErrorCode::ParseError, "text", "missing field");
    }
    if (auto it = j.find("comment_id"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw Error(ErrorCode::ParseError, "comment_id", "expected string");
        r.comment_id = it->template get<std::string>();
    }
    if (auto it = j.find("has_spam_hint"); it != j.end() && !it->is_null()) {
        if (!it->is_boolean()) throw Error(ErrorCode::BadBoolean, "has_spam_hint", "expected boolean");
        r.has_spam_hint = it->template get<bool>();
    }
    return validate_record(std::move(r));
}

inline ordered_json to_json(const FeatureVector& fv) {
    ordered_json j;
    j["user_id"] = fv.user_id;
    j["n_comments"] = fv.n_comments;
    if (fv.atdc_s) j["atdc_s"] = *fv.atdc_s;
    j["pchf_pct"] = fv.pchf_pct;
    j["crr"] = fv.crr;
    j["vidovp"] = fv.vidovp;
    j["crav"] = fv.crav;
    return j;
}

template <typename J>
FeatureVector feature_vector_from_json(const J& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "features", "expected JSON object");
    FeatureVector fv;
    try {
        fv.user_id = j.at("user_id").template get<std::string>();
        fv.n_comments = j.at("n_comments").template get<std::size_t>();
        if (auto it = j.find("atdc_s"); it != j.end() && !it->is_null())
            fv.atdc_s = it->template get<double>();
        fv.pchf_pct = j.at("pchf_pct").template get<double>();
        fv.crr = j.at("crr").template get<double>();
        fv.vidovp = j.at("vidovp").template get<double>();
        fv.crav = j.at("crav").template get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, "features", e.what());
    }
    return fv;
}

inline ordered_json to_json(const Verdict& v) {
    ordered_json j;
    j["user_id"] = v.user_id;
    j["label"] = std::string(to_string(v.label));
    ordered_json trig = ordered_json::array();
    for (Indicator i : v.triggered) trig.push_back(std::string(to_string(i)));
    j["triggered"] = std::move(trig);
    j["features"] = to_json(v.features);
    return j;
}

inline std::string to_json_line(const Verdict& v) {
    return to_json(v).dump(-1, ' ', false, json::error_handler_t::replace);
}

template <typename J>
Verdict verdict_from_json(const J& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "", "expected JSON object");
    Verdict v;
    v.user_id = detail::require_string(j, "user_id");
    auto label = label_from_string(detail::require_string(j, "label"));
    if (!label) throw Error(ErrorCode::ParseError, "label", "unknown label");
    v.label = *label;
    auto trig = j.find("triggered");
    if (trig == j.end() || !trig->is_array()) throw Error(ErrorCode::ParseError, "triggered", "expected array");
    for (const auto& t : *trig) {
        auto ind = t.is_string() ? indicator_from_string(t.template get<std::string>()) : std::nullopt;
        if (!ind) throw Error(ErrorCode::ParseError, "triggered", "unknown indicator");
        v.triggered.push_back(*ind);
    }
    auto feats = j.find("features");
    if (feats == j.end()) throw Error(ErrorCode::ParseError, "features", "missing field");
    v.features = feature_vector_from_json(*feats);
    return v;
}

inline ordered_json to_json(const RuleConfig& cfg) {
    ordered_json j;
    j["min_comments"] = cfg.min_comments;
    j["pchf_gt"] = cfg.pchf_gt;
    j["atdc_lt_s"] = cfg.atdc_lt_s;
    j["comovp_gt"] = cfg.comovp_gt;
    j["vidovp_gt"] = cfg.vidovp_gt;
    j["combine"] = "or";
    return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
template <typename J>
RuleConfig rule_config_from_json(const J& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "", "expected JSON object");
    RuleConfig cfg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const auto& val = it.value();
        auto number = [&]() -> double {
            if (!val.is_number()) throw Error(ErrorCode::InvalidConfig, key, "expected number");
            return val.template get<double>();
        };
        if (key == "min_comments") {
            if (!val.is_number_integer() || val.template get<std::int64_t>() < 1)
                throw Error(ErrorCode::InvalidConfig, key, "expected positive integer");
            cfg.min_comments = val.template get<std::size_t>();
        } else if (key == "pchf_gt") {
            cfg.pchf_gt = number();
        } else if (key == "atdc_lt_s") {
            cfg.atdc_lt_s = number();
        } else if (key == "comovp_gt") {
            cfg.comovp_gt = number();
        } else if (key == "vidovp_gt") {
            cfg.vidovp_gt = number();
        } else if (key == "combine") {
            if (!val.is_string() || (val.template get<std::string>() != "or" &&
                                     val.template get<std::string>() != "OR"))
                throw Error(ErrorCode::InvalidConfig, key, "only \"or\" is supported");
            cfg.combine = Combine::Or;
        } else {
            throw Error(ErrorCode::InvalidConfig, key, "unknown key");
        }
    }
    cfg.validate();
    return cfg;
}

} // namespace spamscope
