#pragma once

// Reading comment logs: JSON-Lines and CSV files, a paged feed endpoint
// (HTTP or a plain directory) and an on-disk per-user cache.
//
// Malformed lines are skipped and reported; only input where every line was
// rejected is an error.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <unistd.h>

#include <httplib.h>

#include "spamscope/model.hpp"

namespace spamscope {

struct Reject {
    std::size_t line = 0; // 1-based; for CSV the line the row starts on
    ErrorCode error = ErrorCode::ParseError;
    std::string detail;

    bool operator==(const Reject&) const = default;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::vector<Reject> rejects;
};

struct ParseResult {
    std::vector<CommentRecord> records;
    IngestReport report;
};

/// Raised when non-empty input yields no valid record at all.
class IngestError : public Error {
public:
    explicit IngestError(IngestReport report)
        : Error(ErrorCode::AllLinesRejected, "",
                std::to_string(report.rejected) + " of " + std::to_string(report.rejected) +
                    " records rejected"),
          report_(std::move(report)) {}

    const IngestReport& report() const noexcept { return report_; }

private:
    IngestReport report_;
};

namespace detail {

inline void finish(ParseResult& result) {
    result.report.accepted = result.records.size();
    result.report.rejected = result.report.rejects.size();
    if (result.report.accepted == 0 && result.report.rejected > 0) throw IngestError(result.report);
}

inline std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// JSON-Lines

inline ParseResult parse_jsonl(std::istream& in) {
    ParseResult result;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim_ascii(line).empty()) continue;
        try {
            auto j = json::parse(line);
            result.records.push_back(record_from_json(j));
        } catch (const Error& e) {
            result.report.rejects.push_back({lineno, e.code(), e.what()});
        } catch (const json::exception& e) {
            result.report.rejects.push_back({lineno, ErrorCode::ParseError, e.what()});
        }
    }
    detail::finish(result);
    return result;
}

inline ParseResult parse_jsonl(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_jsonl(in);
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180 quoting: fields may hold commas, doubled quotes, newlines)

namespace detail {

class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    struct Row {
        std::vector<std::string> fields;
        std::size_t line = 0;
        bool malformed = false;
    };

    /// False at end of input.
    bool next(Row& row) {
        row.fields.clear();
        row.malformed = false;
        row.line = line_;
        if (in_.peek() == std::char_traits<char>::eof()) return false;

        std::string field;
        bool quoted = false;     // inside quotes
        bool after_quote = false; // closing quote seen, expecting , or EOL
        for (;;) {
            int ch = in_.get();
            if (ch == std::char_traits<char>::eof()) {
                if (quoted) row.malformed = true;
                row.fields.push_back(std::move(field));
                return true;
            }
            char c = static_cast<char>(ch);
            if (quoted) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field += '"';
                    } else {
                        quoted = false;
                        after_quote = true;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field += c;
                }
                continue;
            }
            if (c == ',') {
                row.fields.push_back(std::move(field));
                field.clear();
                after_quote = false;
            } else if (c == '\n' || c == '\r') {
                if (c == '\r' && in_.peek() == '\n') in_.get();
                ++line_;
                row.fields.push_back(std::move(field));
                return true;
            } else if (c == '"' && field.empty() && !after_quote) {
                quoted = true;
            } else {
                if (after_quote || c == '"') row.malformed = true;
                field += c;
            }
        }
    }

private:
    std::istream& in_;
    std::size_t line_ = 1;
};

inline bool blank_row(const CsvReader::Row& row) {
    return row.fields.size() == 1 && trim_ascii(row.fields[0]).empty();
}

} // namespace detail

inline bool parse_bool_field(std::string_view raw) {
    std::string v = detail::lower_ascii(detail::trim_ascii(raw));
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0" || v.empty()) return false;
    throw Error(ErrorCode::BadBoolean, "has_spam_hint", std::string(raw));
}

/// Columns are located by header name, in any order; comment_id is optional.
inline ParseResult parse_csv(std::istream& in) {
    ParseResult result;
    detail::CsvReader reader(in);
    detail::CsvReader::Row row;

    bool have_header = false;
    while (reader.next(row)) {
        if (!detail::blank_row(row)) {
            have_header = true;
            break;
        }
    }
    if (!have_header) return result;

    std::map<std::string, std::size_t, std::less<>> column;
    for (std::size_t i = 0; i < row.fields.size(); ++i) {
        std::string_view name = row.fields[i];
        if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name.remove_prefix(3);
        column.emplace(std::string(detail::trim_ascii(name)), i);
    }
    for (const char* required : {"user_id", "video_id", "published_at", "text", "has_spam_hint"})
        if (!column.contains(required)) throw Error(ErrorCode::MissingHeader, required);
    const std::size_t width = row.fields.size();
    auto comment_col = column.find("comment_id");

    while (reader.next(row)) {
        if (detail::blank_row(row)) continue;
        try {
            if (row.malformed) throw Error(ErrorCode::ParseError, "", "bad quoting");
            if (row.fields.size() != width)
                throw Error(ErrorCode::ParseError, "",
                            "expected " + std::to_string(width) + " fields, got " +
                                std::to_string(row.fields.size()));
            CommentRecord r;
            r.user_id = row.fields[column.find("user_id")->second];
            r.video_id = row.fields[column.find("video_id")->second];
            const std::string& published = row.fields[column.find("published_at")->second];
            auto ts = parse_rfc3339(detail::trim_ascii(published));
            if (!ts) throw Error(ErrorCode::BadTimestamp, "published_at", published);
            r.timestamp_s = *ts;
            r.text = row.fields[column.find("text")->second];
            r.has_spam_hint = parse_bool_field(row.fields[column.find("has_spam_hint")->second]);
            if (comment_col != column.end() && !row.fields[comment_col->second].empty())
                r.comment_id = row.fields[comment_col->second];
            result.records.push_back(validate_record(std::move(r)));
        } catch (const Error& e) {
            result.report.rejects.push_back({row.line, e.code(), e.what()});
        }
    }
    detail::finish(result);
    return result;
}

inline ParseResult parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_csv(in);
}

// ---------------------------------------------------------------------------
// Grouping

/// One log per distinct user, ordered by user_id.
inline std::vector<UserActivityLog> group_by_user(std::vector<CommentRecord> records) {
    std::map<std::string, std::vector<CommentRecord>> by_user;
    for (auto& r : records) {
        std::string key(detail::trim_ascii(r.user_id));
        by_user[key].push_back(std::move(r));
    }
    std::vector<UserActivityLog> logs;
    logs.reserve(by_user.size());
    for (auto& [user, recs] : by_user) logs.push_back(build_log(user, std::move(recs)));
    return logs;
}

// ---------------------------------------------------------------------------
// Serialization and cache

inline void write_jsonl(std::ostream& out, std::span<const CommentRecord> records) {
    for (const auto& r : records) out << to_json_line(r) << '\n';
}

inline std::string to_jsonl(const UserActivityLog& log) {
    std::ostringstream out;
    write_jsonl(out, log.records());
    return out.str();
}

/// File name used for a user in the cache and in directory feeds. Ordinary
/// ids map to themselves; path separators, control bytes and a leading dot
/// are percent-encoded.
inline std::string user_file_name(std::string_view user_id) {
    std::string out;
    for (std::size_t i = 0; i < user_id.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(user_id[i]);
        bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '@' || c >= 0x80 || (c == '.' && i > 0);
        if (safe) {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out + ".jsonl";
}

namespace detail {

inline std::string unique_suffix() {
    static std::atomic<unsigned long> counter{0};
    std::ostringstream s;
    s << ".tmp." << ::getpid() << '.' << std::hash<std::thread::id>{}(std::this_thread::get_id())
      << '.' << counter++;
    return s.str();
}

} // namespace detail

/// Writes {dir}/{user}.jsonl through a temp file and rename, so readers see
/// either the old or the new log.
inline void cache_put(const std::filesystem::path& dir, const UserActivityLog& log) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, dir.string(), ec.message());

    fs::path target = dir / user_file_name(log.user_id());
    fs::path tmp = target;
    tmp += detail::unique_suffix();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, tmp.string(), "cannot open for writing");
        write_jsonl(out, log.records());
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw Error(ErrorCode::IoError, tmp.string(), "write failed");
        }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw Error(ErrorCode::IoError, target.string(), ec.message());
    }
}

inline std::optional<UserActivityLog> cache_get(const std::filesystem::path& dir,
                                                std::string_view user_id) {
    std::filesystem::path file = dir / user_file_name(user_id);
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        auto parsed = parse_jsonl(in);
        if (parsed.report.rejected > 0)
            throw Error(ErrorCode::IoError, file.string(),
                        "corrupt cache entry at line " + std::to_string(parsed.report.rejects[0].line));
        return build_log(user_id, std::move(parsed.records));
    } catch (const IngestError&) {
        throw Error(ErrorCode::IoError, file.string(), "corrupt cache entry");
    }
}

// ---------------------------------------------------------------------------
// Paged feed client

struct FeedPage {
    std::vector<CommentRecord> comments;
    std::optional<std::string> next_page_token;
};

inline ordered_json to_json(const FeedPage& page) {
    ordered_json j;
    j["comments"] = ordered_json::array();
    for (const auto& c : page.comments) j["comments"].push_back(to_json(c));
    if (page.next_page_token) j["next_page_token"] = *page.next_page_token;
    return j;
}

/// Throws MalformedPage naming `token` on any shape error.
inline FeedPage feed_page_from_json(std::string_view body, const std::string& token) {
    auto fail = [&](const std::string& why) -> Error {
        return Error(ErrorCode::MalformedPage, token.empty() ? "<first page>" : token, why);
    };
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw fail(e.what());
    }
    if (!j.is_object()) throw fail("expected JSON object");
    auto comments = j.find("comments");
    if (comments == j.end() || !comments->is_array()) throw fail("missing comments array");
    FeedPage page;
    for (const auto& c : *comments) {
        try {
            page.comments.push_back(record_from_json(c));
        } catch (const Error& e) {
            throw fail(e.what());
        }
    }
    if (auto t = j.find("next_page_token"); t != j.end() && !t->is_null()) {
        if (!t->is_string()) throw fail("next_page_token must be a string");
        if (!t->get_ref<const std::string&>().empty()) page.next_page_token = t->get<std::string>();
    }
    return page;
}

struct FetchOptions {
    std::size_t page_limit = 20;
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500}; // doubles per retry: 0.5s, 1s, 2s
    std::chrono::seconds connect_timeout{5};
    std::chrono::seconds read_timeout{10};
};

struct FetchResult {
    UserActivityLog log;
    bool truncated = false; // page_limit reached with more pages pending
    std::size_t pages = 0;
    std::size_t requests = 0;
};

namespace detail {

inline std::string percent_encode(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        bool unreserved = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                          c == '-' || c == '_' || c == '.' || c == '~';
        if (unreserved) {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

struct HttpBase {
    std::string scheme_host_port;
    std::string prefix; // path without trailing slash
};

inline HttpBase split_url(std::string_view url) {
    auto scheme_end = url.find("://");
    auto path_start = url.find('/', scheme_end + 3);
    HttpBase b;
    b.scheme_host_port = std::string(url.substr(0, path_start));
    if (path_start != std::string_view::npos) b.prefix = std::string(url.substr(path_start));
    while (!b.prefix.empty() && b.prefix.back() == '/') b.prefix.pop_back();
    return b;
}

inline FetchResult fetch_http(std::string_view url, std::string_view user_id,
                              const FetchOptions& opt) {
    HttpBase base = split_url(url);
    httplib::Client client(base.scheme_host_port);
    client.set_connection_timeout(opt.connect_timeout);
    client.set_read_timeout(opt.read_timeout);

    const std::string user_path = base.prefix + "/users/" + percent_encode(user_id) + "/comments";
    FetchResult result;
    std::vector<CommentRecord> all;
    std::optional<std::string> token;

    for (;;) {
        std::string path = user_path;
        if (token) path += "?page_token=" + percent_encode(*token);
        const std::string token_name = token.value_or("");

        std::string failure;
        std::optional<std::string> body;
        auto delay = opt.initial_backoff;
        for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(delay);
                delay *= 2;
            }
            ++result.requests;
            auto res = client.Get(path);
            if (!res) {
                failure = httplib::to_string(res.error());
                continue;
            }
            if (res->status == 404) throw Error(ErrorCode::UserNotFound, std::string(user_id));
            if (res->status != 200) {
                failure = "HTTP " + std::to_string(res->status);
                continue;
            }
            body = std::move(res->body);
            break;
        }
        if (!body)
            throw Error(ErrorCode::EndpointUnreachable, std::string(url),
                        failure + " after " + std::to_string(opt.max_retries + 1) + " attempts");

        FeedPage page = feed_page_from_json(*body, token_name);
        ++result.pages;
        for (auto& c : page.comments) all.push_back(std::move(c));
        token = std::move(page.next_page_token);
        if (!token) break;
        if (result.pages >= opt.page_limit) {
            result.truncated = true;
            break;
        }
    }
    result.log = build_log(user_id, std::move(all));
    return result;
}

inline FetchResult fetch_directory(const std::filesystem::path& dir, std::string_view user_id) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw Error(ErrorCode::EndpointUnreachable, dir.string(), "not a directory");
    std::filesystem::path file = dir / user_file_name(user_id);
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::UserNotFound, std::string(user_id));
    FetchResult result;
    result.requests = 1;
    result.pages = 1;
    try {
        auto parsed = parse_jsonl(in);
        result.log = build_log(user_id, std::move(parsed.records));
    } catch (const IngestError& e) {
        throw Error(ErrorCode::MalformedPage, file.string(), e.what());
    }
    return result;
}

} // namespace detail

/// `endpoint` is either an http:// base URL serving
/// GET {base}/users/{id}/comments[?page_token=T], or a directory holding
/// {id}.jsonl. Transport failures and non-404 error statuses are retried
/// with exponential backoff.
inline FetchResult fetch_user_log(std::string_view endpoint, std::string_view user_id,
                                  const FetchOptions& opt = {}) {
    if (opt.page_limit == 0) throw Error(ErrorCode::InvalidConfig, "page_limit", "must be positive");
    if (endpoint.starts_with("http://") || endpoint.starts_with("https://"))
        return detail::fetch_http(endpoint, user_id, opt);
    return detail::fetch_directory(std::filesystem::path(std::string(endpoint)), user_id);
}

} // namespace spamscope
