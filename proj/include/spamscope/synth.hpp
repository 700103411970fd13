#pragma once

// Seeded synthetic comment corpora with ground truth. Each spam persona is
// built so that its target indicator clears the default rule threshold, and
// the legit persona stays clear of all four.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spamscope/model.hpp"

namespace spamscope {

enum class PersonaKind { Bot, CrossVideoPromoter, Repeater, Flagged, Legit };

constexpr std::string_view to_string(PersonaKind k) noexcept {
    switch (k) {
    case PersonaKind::Bot: return "bot";
    case PersonaKind::CrossVideoPromoter: return "promoter";
    case PersonaKind::Repeater: return "repeater";
    case PersonaKind::Flagged: return "flagged";
    case PersonaKind::Legit: return "legit";
    }
    return "?";
}

inline std::optional<PersonaKind> persona_kind_from_string(std::string_view s) {
    for (PersonaKind k : {PersonaKind::Bot, PersonaKind::CrossVideoPromoter, PersonaKind::Repeater,
                          PersonaKind::Flagged, PersonaKind::Legit})
        if (to_string(k) == s) return k;
    if (s == "cross_video_promoter" || s == "CrossVideoPromoter") return PersonaKind::CrossVideoPromoter;
    return std::nullopt;
}

struct IntRange {
    std::int64_t min = 0;
    std::int64_t max = 0;
    bool operator==(const IntRange&) const = default;
};

struct PersonaSpec {
    PersonaKind kind = PersonaKind::Legit;
    std::size_t count = 0;
    IntRange comments_per_user{10, 40};
    IntRange gap_s{3600, 259200};  // seconds between consecutive comments
    std::int64_t window_s = 149;   // Bot: total session span
    IntRange videos{1, 2};         // Promoter: distinct videos; Repeater/Legit: at most max
    double duplicate_fraction = 0.8; // Repeater
    double hint_fraction = 0.05;     // Flagged: at least; Legit: at most; others: exactly

    static PersonaSpec defaults(PersonaKind kind, std::size_t count = 0) {
        PersonaSpec s;
        s.kind = kind;
        s.count = count;
        switch (kind) {
        case PersonaKind::Bot:
            s.gap_s = {1, 30};
            s.videos = {1, 50};
            s.hint_fraction = 0.1;
            break;
        case PersonaKind::CrossVideoPromoter:
            s.gap_s = {600, 14400};
            s.videos = {8, 20};
            s.hint_fraction = 0.1;
            break;
        case PersonaKind::Repeater:
            s.gap_s = {600, 86400};
            s.videos = {1, 2};
            s.hint_fraction = 0.1;
            break;
        case PersonaKind::Flagged:
            s.gap_s = {600, 86400};
            s.videos = {1, 50};
            s.hint_fraction = 0.8;
            break;
        case PersonaKind::Legit:
            s.comments_per_user = {2, 30};
            s.gap_s = {3600, 259200};
            s.videos = {1, 2};
            s.hint_fraction = 0.05;
            break;
        }
        return s;
    }

    void validate() const {
        auto bad = [](const char* field, const std::string& why) {
            throw Error(ErrorCode::InvalidSpec, field, why);
        };
        auto range = [&](const IntRange& r, const char* field, std::int64_t floor) {
            if (r.min < floor) bad(field, "minimum below " + std::to_string(floor));
            if (r.min > r.max) bad(field, "empty range");
        };
        range(comments_per_user, "comments_per_user", 1);
        range(gap_s, "gap_s", 0);
        range(videos, "videos", 1);
        if (videos.max > kVideoPool) bad("videos", "exceeds pool of " + std::to_string(kVideoPool));
        if (!(duplicate_fraction >= 0 && duplicate_fraction <= 1)) bad("duplicate_fraction", "outside [0,1]");
        if (!(hint_fraction >= 0 && hint_fraction <= 1)) bad("hint_fraction", "outside [0,1]");
        if (window_s < 0) bad("window_s", "negative");
        if (kind == PersonaKind::Bot && gap_s.min * (comments_per_user.max - 1) > window_s)
            bad("gap_s", "minimum gap cannot fit the session window");
    }

    static constexpr std::int64_t kVideoPool = 400;
};

/// The 200-user benchmark mix: 100 legit, 25 of each spam persona.
inline std::vector<PersonaSpec> benchmark_personas() {
    return {PersonaSpec::defaults(PersonaKind::Legit, 100),
            PersonaSpec::defaults(PersonaKind::Bot, 25),
            PersonaSpec::defaults(PersonaKind::CrossVideoPromoter, 25),
            PersonaSpec::defaults(PersonaKind::Repeater, 25),
            PersonaSpec::defaults(PersonaKind::Flagged, 25)};
}

struct LabeledCorpus {
    std::vector<CommentRecord> records;
    std::map<std::string, Label> truth; // Spammer or Legit

    std::size_t spammers() const {
        return static_cast<std::size_t>(std::count_if(truth.begin(), truth.end(),
                                                      [](const auto& kv) { return kv.second == Label::Spammer; }));
    }
};

namespace detail {

/// Thin wrapper over mt19937_64. The standard distributions are
/// implementation-defined, so bounded draws use rejection on raw output to
/// keep corpora identical across standard libraries.
class SeededStream {
public:
    explicit SeededStream(std::uint64_t seed) : engine_(seed) {}

    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        if (lo >= hi) return lo;
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(n) - 1)); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

inline constexpr std::string_view kSpamTemplates[] = {
    "watch?v=JNVeTR9MhAo?",
    "Check out my channel",
    "Please watch my vids at airborn2048",
    "CAT almost BIT ME A FINGER OFF)))))   view on my channel ))))",
    "password please !!!!!!!!!!!!!!!!!!!!!!!!!!!!!1",
    "watch?v=DGHC-AgB8Us?",
    "TV4500Channels.blogspot.com",
    "If you have any immense black ops videos please could you send them to bennyboy536@hotmail.com",
    "This would give you publicity and increase your rep. For your videos to be posted on the top 5 amazing kills Thanks",
    "PLZ SUBSCRIBE AND COMMENT TO MY CHANNEL PLZ GIVE ME A CHANCE AND HEAR MA SONGS",
    "CHECK OUT MY VIDS AND COMMENT",
    "CHECK OUT OUR CHANNEL! IT IS SO FUNNY! PLEASE SUBSCRIBE!",
    "chek out nikkayx26",
    "Make sure to check out my page for the  Exclusive Dance Battle of the Week!!!",
};

inline constexpr std::string_view kLegitWords[] = {
    "great", "video", "song", "love", "the", "part", "where", "this", "really", "funny",
    "nice", "camera", "work", "guitar", "lyrics", "chorus", "remember", "when", "first",
    "heard", "awesome", "dude", "thanks", "sharing", "tutorial", "helped", "me", "lot",
};

inline std::string video_name(std::int64_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "vid-%04lld", static_cast<long long>(i));
    return buf;
}

inline std::string comment_name(const std::string& user, std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-c%04zu", k);
    return user + buf;
}

inline std::string numbered(std::string_view prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-%04zu", i);
    return std::string(prefix) + buf;
}

/// Distinct video ids, sampled without replacement.
inline std::vector<std::string> sample_videos(SeededStream& rng, std::size_t k) {
    std::vector<std::int64_t> pool(PersonaSpec::kVideoPool);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<std::int64_t>(i);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + rng.index(pool.size() - i);
        std::swap(pool[i], pool[j]);
        out.push_back(video_name(pool[i]));
    }
    return out;
}

inline std::string unique_text(SeededStream& rng, const std::string& user, std::size_t k) {
    std::string s;
    std::size_t words = 3 + rng.index(6);
    for (std::size_t w = 0; w < words; ++w) {
        if (w) s += ' ';
        s += kLegitWords[rng.index(std::size(kLegitWords))];
    }
    return s + " (" + user + " #" + std::to_string(k) + ")";
}

inline std::vector<bool> hint_mask(SeededStream& rng, std::size_t n, std::size_t hinted) {
    std::vector<bool> mask(n, false);
    for (std::size_t i = 0; i < hinted && i < n; ++i) mask[i] = true;
    rng.shuffle(mask);
    return mask;
}

inline void emit_user(SeededStream& rng, const PersonaSpec& spec, const std::string& user,
                      std::vector<CommentRecord>& out) {
    constexpr std::int64_t kBaseEpoch = 1275350400; // 2010-06-01T00:00:00Z
    const auto n = static_cast<std::size_t>(rng.uniform(spec.comments_per_user.min, spec.comments_per_user.max));
    const std::int64_t start = kBaseEpoch + rng.uniform(0, 180 * 86400);

    std::vector<std::int64_t> times(n);
    std::vector<std::string> videos(n), texts(n);
    std::size_t hinted = static_cast<std::size_t>(std::floor(spec.hint_fraction * static_cast<double>(n)));

    std::int64_t t = start;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            std::int64_t gap = rng.uniform(spec.gap_s.min, spec.gap_s.max);
            if (spec.kind == PersonaKind::Bot) gap = std::min(gap, start + spec.window_s - t);
            t += gap;
        }
        times[k] = t;
    }

    switch (spec.kind) {
    case PersonaKind::Bot:
    case PersonaKind::Flagged: {
        auto pool = sample_videos(rng, static_cast<std::size_t>(rng.uniform(spec.videos.min, spec.videos.max)));
        for (std::size_t k = 0; k < n; ++k) {
            videos[k] = pool[rng.index(pool.size())];
            texts[k] = std::string(kSpamTemplates[rng.index(std::size(kSpamTemplates))]);
        }
        if (spec.kind == PersonaKind::Flagged)
            hinted = static_cast<std::size_t>(std::ceil(spec.hint_fraction * static_cast<double>(n)));
        break;
    }
    case PersonaKind::CrossVideoPromoter: {
        auto d = std::min<std::size_t>(n, static_cast<std::size_t>(rng.uniform(spec.videos.min, spec.videos.max)));
        auto pool = sample_videos(rng, d);
        std::string text(kSpamTemplates[rng.index(std::size(kSpamTemplates))]);
        // round-robin keeps per-video counts balanced, minimizing same-video pairs
        for (std::size_t k = 0; k < n; ++k) {
            videos[k] = pool[k % d];
            texts[k] = text;
        }
        rng.shuffle(videos);
        break;
    }
    case PersonaKind::Repeater: {
        auto pool = sample_videos(rng, static_cast<std::size_t>(rng.uniform(spec.videos.min, spec.videos.max)));
        std::string text(kSpamTemplates[rng.index(std::size(kSpamTemplates))]);
        auto dupes = static_cast<std::size_t>(std::ceil(spec.duplicate_fraction * static_cast<double>(n)));
        for (std::size_t k = 0; k < n; ++k) {
            videos[k] = pool[rng.index(pool.size())];
            texts[k] = k < dupes ? text : unique_text(rng, user, k);
        }
        rng.shuffle(texts);
        break;
    }
    case PersonaKind::Legit: {
        auto pool = sample_videos(rng, static_cast<std::size_t>(rng.uniform(spec.videos.min, spec.videos.max)));
        std::size_t second = pool.size() > 1 ? static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(n / 2))) : 0;
        // keep the different-video pair rate strictly below 0.6:
        // second*(n-second) / C(n,2) < 0.6  <=>  10*second*(n-second) < 3*n*(n-1)
        while (second > 0 && 10 * second * (n - second) >= 3 * n * (n - 1)) --second;
        for (std::size_t k = 0; k < n; ++k) {
            videos[k] = k < second ? pool[1] : pool[0];
            texts[k] = unique_text(rng, user, k);
        }
        rng.shuffle(videos);
        break;
    }
    }

    auto mask = hint_mask(rng, n, hinted);
    for (std::size_t k = 0; k < n; ++k) {
        CommentRecord r;
        r.user_id = user;
        r.comment_id = comment_name(user, k);
        r.video_id = videos[k];
        r.timestamp_s = times[k];
        r.text = texts[k];
        r.has_spam_hint = mask[k];
        out.push_back(std::move(r));
    }
}

} // namespace detail

/// Deterministic in (specs, seed). User ids encode the persona, for example
/// "bot-0007"; numbering continues across specs of the same kind.
inline LabeledCorpus generate(std::span<const PersonaSpec> specs, std::uint64_t seed) {
    for (const auto& s : specs) s.validate();
    detail::SeededStream rng(seed);
    LabeledCorpus corpus;
    std::map<PersonaKind, std::size_t> next_index;
    for (const auto& spec : specs) {
        for (std::size_t i = 0; i < spec.count; ++i) {
            std::string user = detail::numbered(to_string(spec.kind), next_index[spec.kind]++);
            detail::emit_user(rng, spec, user, corpus.records);
            corpus.truth[user] = spec.kind == PersonaKind::Legit ? Label::Legit : Label::Spammer;
        }
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// JSON

inline ordered_json to_json(const PersonaSpec& s) {
    ordered_json j;
    j["kind"] = std::string(to_string(s.kind));
    j["count"] = s.count;
    j["comments_per_user"] = {s.comments_per_user.min, s.comments_per_user.max};
    j["gap_s"] = {s.gap_s.min, s.gap_s.max};
    j["window_s"] = s.window_s;
    j["videos"] = {s.videos.min, s.videos.max};
    j["duplicate_fraction"] = s.duplicate_fraction;
    j["hint_fraction"] = s.hint_fraction;
    return j;
}

/// Unspecified knobs take the persona defaults; unknown keys are rejected.
template <typename J>
PersonaSpec persona_spec_from_json(const J& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "persona", "expected JSON object");
    auto kind_it = j.find("kind");
    if (kind_it == j.end() || !kind_it->is_string()) throw Error(ErrorCode::InvalidSpec, "kind", "missing");
    auto kind = persona_kind_from_string(kind_it->template get<std::string>());
    if (!kind) throw Error(ErrorCode::InvalidSpec, "kind", "unknown persona " + kind_it->dump());
    PersonaSpec s = PersonaSpec::defaults(*kind);

    auto range = [](const J& v, const std::string& key) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
            throw Error(ErrorCode::InvalidSpec, key, "expected [min, max] integers");
        return IntRange{v[0].template get<std::int64_t>(), v[1].template get<std::int64_t>()};
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const J& v = it.value();
        if (key == "kind") continue;
        if (key == "count") {
            if (!v.is_number_integer() || v.template get<std::int64_t>() < 0)
                throw Error(ErrorCode::InvalidSpec, key, "expected non-negative integer");
            s.count = v.template get<std::size_t>();
        } else if (key == "comments_per_user") {
            s.comments_per_user = range(v, key);
        } else if (key == "gap_s") {
            s.gap_s = range(v, key);
        } else if (key == "videos") {
            s.videos = range(v, key);
        } else if (key == "window_s") {
            if (!v.is_number_integer()) throw Error(ErrorCode::InvalidSpec, key, "expected integer");
            s.window_s = v.template get<std::int64_t>();
        } else if (key == "duplicate_fraction" || key == "hint_fraction") {
            if (!v.is_number()) throw Error(ErrorCode::InvalidSpec, key, "expected number");
            (key == "hint_fraction" ? s.hint_fraction : s.duplicate_fraction) = v.template get<double>();
        } else {
            throw Error(ErrorCode::InvalidSpec, key, "unknown key");
        }
    }
    s.validate();
    return s;
}

/// Accepts {"personas": [...]} or a bare array.
template <typename J>
std::vector<PersonaSpec> persona_specs_from_json(const J& j) {
    const J* arr = &j;
    if (j.is_object()) {
        auto it = j.find("personas");
        if (it == j.end()) throw Error(ErrorCode::InvalidSpec, "personas", "missing");
        arr = &*it;
    }
    if (!arr->is_array()) throw Error(ErrorCode::InvalidSpec, "personas", "expected array");
    std::vector<PersonaSpec> specs;
    for (const auto& p : *arr) specs.push_back(persona_spec_from_json(p));
    return specs;
}

inline ordered_json truth_to_json(const LabeledCorpus& c) {
    ordered_json j = ordered_json::object();
    for (const auto& [user, label] : c.truth) j[user] = std::string(to_string(label));
    return j;
}

template <typename J>
std::map<std::string, Label> truth_from_json(const J& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "truth", "expected JSON object");
    std::map<std::string, Label> truth;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto label = it.value().is_string() ? label_from_string(it.value().template get<std::string>()) : std::nullopt;
        if (!label || *label == Label::Insufficient)
            throw Error(ErrorCode::ParseError, it.key(), "expected \"spammer\" or \"legit\"");
        truth[it.key()] = *label;
    }
    return truth;
}

} // namespace spamscope
