#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "mock_feed.hpp"
#include "oracle.hpp"
#include "spamscope/ingest.hpp"

using namespace spamscope;
namespace fs = std::filesystem;

namespace {

const char* kLine1 =
    R"({"user_id":"u1","comment_id":"c1","video_id":"v1","published_at":"2011-03-01T10:00:00Z","text":"hi","has_spam_hint":false})";
const char* kLine2 =
    R"({"user_id":"u1","comment_id":"c2","video_id":"v2","published_at":"2011-03-01T10:01:00Z","text":"Check out my channel","has_spam_hint":true})";
const char* kLine3 =
    R"({"user_id":"u2","video_id":"v1","published_at":"2011-03-01T11:00:00+01:00","text":"nice"})";

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("spamscope-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST(ParseJsonl, ValidLines) {
    auto res = parse_jsonl(std::string(kLine1) + "\n" + kLine2 + "\n" + kLine3 + "\n");
    ASSERT_EQ(res.records.size(), 3u);
    EXPECT_EQ(res.report.accepted, 3u);
    EXPECT_EQ(res.report.rejected, 0u);
    EXPECT_TRUE(res.records[1].has_spam_hint);
    EXPECT_EQ(res.records[2].timestamp_s, *parse_rfc3339("2011-03-01T10:00:00Z"));
}

TEST(ParseJsonl, SkipsAndReportsGarbage) {
    auto res = parse_jsonl(std::string(kLine1) + "\n" + kLine2 + "\n{not json\n");
    EXPECT_EQ(res.records.size(), 2u);
    ASSERT_EQ(res.report.rejects.size(), 1u);
    EXPECT_EQ(res.report.rejects[0].line, 3u);
    EXPECT_EQ(res.report.rejects[0].error, ErrorCode::ParseError);
}

TEST(ParseJsonl, NamesValidationErrors) {
    std::string bad_ts = R"({"user_id":"u","video_id":"v","published_at":"noon","text":""})";
    std::string no_user = R"({"user_id":" ","video_id":"v","published_at":"2011-03-01T10:00:00Z","text":""})";
    std::string neg = R"({"user_id":"u","video_id":"v","published_at":"1969-01-01T00:00:00Z","text":""})";
    auto res = parse_jsonl(std::string(kLine1) + "\n" + bad_ts + "\n" + no_user + "\n\n" + neg + "\n");
    ASSERT_EQ(res.report.rejects.size(), 3u);
    EXPECT_EQ(res.report.rejects[0], (Reject{2, ErrorCode::BadTimestamp, res.report.rejects[0].detail}));
    EXPECT_EQ(res.report.rejects[1].error, ErrorCode::EmptyUserId);
    EXPECT_EQ(res.report.rejects[2].line, 5u); // blank line 4 is not a record
    EXPECT_EQ(res.report.rejects[2].error, ErrorCode::NegativeTimestamp);
}

TEST(ParseJsonl, EmptyInputIsNotAnError) {
    auto res = parse_jsonl("");
    EXPECT_TRUE(res.records.empty());
    EXPECT_EQ(res.report.rejected, 0u);
    EXPECT_TRUE(parse_jsonl("\n\n  \n").records.empty());
}

TEST(ParseJsonl, AllRejectedThrows) {
    try {
        parse_jsonl("garbage\nmore garbage\n");
        FAIL();
    } catch (const IngestError& e) {
        EXPECT_EQ(e.code(), ErrorCode::AllLinesRejected);
        EXPECT_EQ(e.report().rejected, 2u);
    }
}

TEST(ParseJsonl, HandlesCrlf) {
    auto res = parse_jsonl(std::string(kLine1) + "\r\n" + kLine2 + "\r\n");
    EXPECT_EQ(res.records.size(), 2u);
}

TEST(ParseCsv, HeaderAndRows) {
    auto res = parse_csv(
        "user_id,comment_id,video_id,published_at,text,has_spam_hint\n"
        "u1,c1,v1,2011-03-01T10:00:00Z,hello,false\n"
        "u1,c2,v2,2011-03-01T10:00:05Z,\"Check out, my \"\"channel\"\"\nnow\",true\n");
    ASSERT_EQ(res.records.size(), 2u);
    EXPECT_EQ(res.records[1].text, "Check out, my \"channel\"\nnow");
    EXPECT_TRUE(res.records[1].has_spam_hint);
    EXPECT_EQ(res.records[0].comment_id, "c1");
}

TEST(ParseCsv, MissingHeaderColumn) {
    try {
        parse_csv("user_id,comment_id,published_at,text,has_spam_hint\nu1,c1,2011-03-01T10:00:00Z,hi,0\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingHeader);
        EXPECT_EQ(e.subject(), "video_id");
    }
}

TEST(ParseCsv, BooleanCoercions) {
    auto res = parse_csv(
        "has_spam_hint,text,published_at,video_id,user_id\n"
        "true,a,2011-03-01T10:00:00Z,v,u\n"
        "false,b,2011-03-01T10:00:00Z,v,u\n"
        "1,c,2011-03-01T10:00:00Z,v,u\n"
        "0,d,2011-03-01T10:00:00Z,v,u\n"
        ",e,2011-03-01T10:00:00Z,v,u\n"
        "maybe,f,2011-03-01T10:00:00Z,v,u\n");
    ASSERT_EQ(res.records.size(), 5u);
    EXPECT_TRUE(res.records[0].has_spam_hint);
    EXPECT_FALSE(res.records[1].has_spam_hint);
    EXPECT_TRUE(res.records[2].has_spam_hint);
    EXPECT_FALSE(res.records[3].has_spam_hint);
    EXPECT_FALSE(res.records[4].has_spam_hint);
    ASSERT_EQ(res.report.rejects.size(), 1u);
    EXPECT_EQ(res.report.rejects[0].line, 7u);
    EXPECT_EQ(res.report.rejects[0].error, ErrorCode::BadBoolean);
    EXPECT_FALSE(res.records[0].comment_id.has_value());
}

TEST(ParseCsv, RowLineNumbersAccountForEmbeddedNewlines) {
    auto res = parse_csv(
        "user_id,video_id,published_at,text,has_spam_hint\r\n"
        "u,v,2011-03-01T10:00:00Z,\"multi\nline\",0\r\n"
        "u,v,2011-03-01T10:00:00Z,too,many,fields\r\n"
        "u,v,2011-03-01T10:00:00Z,\"bad\"quote,0\r\n");
    EXPECT_EQ(res.records.size(), 1u);
    ASSERT_EQ(res.report.rejects.size(), 2u);
    EXPECT_EQ(res.report.rejects[0].line, 4u);
    EXPECT_EQ(res.report.rejects[1].line, 5u);
}

TEST(ParseCsv, AllRowsRejected) {
    EXPECT_THROW(parse_csv("user_id,video_id,published_at,text,has_spam_hint\nu,v,never,t,0\n"), IngestError);
    EXPECT_TRUE(parse_csv("").records.empty());
}

TEST(GroupByUser, OneLogPerUserSorted) {
    std::vector<CommentRecord> recs;
    for (int i = 0; i < 3; ++i) recs.push_back({"u2", std::nullopt, "v", 100 - i, "x", false});
    for (int i = 0; i < 2; ++i) recs.push_back({"u1", std::nullopt, "v", i, "y", false});
    auto logs = group_by_user(recs);
    ASSERT_EQ(logs.size(), 2u);
    EXPECT_EQ(logs[0].user_id(), "u1");
    EXPECT_EQ(logs[0].size(), 2u);
    EXPECT_EQ(logs[1].size(), 3u);
    EXPECT_EQ(logs[1].records()[0].timestamp_s, 98);
    EXPECT_TRUE(group_by_user({}).empty());
}

TEST(GroupByUser, CrawlScaleShape) {
    std::mt19937_64 rng(1);
    std::vector<CommentRecord> recs;
    for (int i = 0; i < 13000; ++i) {
        std::string user = "user" + std::to_string(i < 240 ? i : rng() % 240);
        recs.push_back({user, user + "-" + std::to_string(i), "v", i, "t", false});
    }
    auto logs = group_by_user(recs);
    EXPECT_EQ(logs.size(), 240u);
    std::size_t total = 0;
    for (const auto& l : logs) total += l.size();
    EXPECT_EQ(total, 13000u);
}

TEST(Serialization, JsonlRoundTripProperty) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
        auto log = oracle::random_log(rng, 40);
        if (log.empty()) continue;
        auto parsed = parse_jsonl(to_jsonl(log));
        EXPECT_EQ(build_log(log.user_id(), parsed.records), log);
    }
}

TEST(Cache, PutGetRoundTrip) {
    auto dir = temp_dir("cache");
    std::mt19937_64 rng(9);
    auto records = oracle::random_records(rng, 30, "alice");
    records.push_back({"alice", std::nullopt, "v9", 12, "tab\tand \"quote\"", true});
    auto log = build_log("alice", records);
    cache_put(dir, log);
    EXPECT_TRUE(fs::exists(dir / "alice.jsonl"));
    EXPECT_EQ(cache_get(dir, "alice"), log);
    EXPECT_FALSE(cache_get(dir, "bob").has_value());
}

TEST(Cache, SecondPutReplacesFirst) {
    auto dir = temp_dir("replace");
    auto first = build_log("u", {{"u", "c1", "v", 1, "one", false}});
    auto second = build_log("u", {{"u", "c2", "v", 2, "two", false}, {"u", "c3", "v", 3, "three", true}});
    cache_put(dir, first);
    cache_put(dir, second);
    EXPECT_EQ(cache_get(dir, "u"), second);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    EXPECT_EQ(files, 1u); // no temp files left
}

TEST(Cache, AwkwardUserIdsStayInsideDirectory) {
    auto dir = temp_dir("awkward");
    for (std::string user : {"../escape", "a/b", ".hidden", "name with space"}) {
        auto log = build_log(user, {{user, std::nullopt, "v", 1, "x", false}});
        cache_put(dir, log);
        EXPECT_EQ(cache_get(dir, user), log) << user;
    }
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().parent_path(), dir);
    EXPECT_FALSE(fs::exists(dir.parent_path() / "escape.jsonl"));
}

TEST(Cache, ConcurrentWritersForDistinctUsers) {
    auto dir = temp_dir("concurrent");
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            std::mt19937_64 rng(t);
            for (int k = 0; k < 20; ++k) {
                std::string user = "user" + std::to_string(t);
                auto recs = oracle::random_records(rng, 20, user);
                recs.push_back({user, std::nullopt, "v", k, "x", false});
                cache_put(dir, build_log(user, recs));
            }
        });
    }
    for (auto& th : threads) th.join();
    for (int t = 0; t < 8; ++t) EXPECT_TRUE(cache_get(dir, "user" + std::to_string(t)).has_value());
}

TEST(Cache, UnwritableDirectoryIsIoError) {
    auto dir = temp_dir("blocked");
    std::ofstream(dir / "file") << "x";
    try {
        cache_put(dir / "file" / "sub", build_log("u", {{"u", std::nullopt, "v", 1, "x", false}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
}

// ---------------------------------------------------------------------------

namespace {
FetchOptions quick() {
    FetchOptions o;
    o.initial_backoff = std::chrono::milliseconds(5);
    return o;
}
} // namespace

TEST(FetchHttp, ConcatenatesPages) {
    testing_support::MockFeed feed;
    feed.serve_user("alice", {50, 50});
    auto res = fetch_user_log(feed.url(), "alice", quick());
    EXPECT_EQ(res.log.size(), 100u);
    EXPECT_EQ(res.pages, 2u);
    EXPECT_FALSE(res.truncated);
    EXPECT_EQ(feed.requests(), 2);
}

TEST(FetchHttp, MissingUser) {
    testing_support::MockFeed feed;
    try {
        fetch_user_log(feed.url(), "nobody", quick());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UserNotFound);
    }
    EXPECT_EQ(feed.requests(), 1); // 404 is not retried
}

TEST(FetchHttp, MalformedPageNamesToken) {
    testing_support::MockFeed feed;
    feed.serve_user("alice", {10, 10, 10});
    feed.set_page("alice", "p2", {R"({"comments": [{"user_id": "alice"}], "next_page_token": "p3"})"});
    try {
        fetch_user_log(feed.url(), "alice", quick());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedPage);
        EXPECT_EQ(e.subject(), "p2");
    }
    feed.set_page("alice", "p2", {"<html>oops</html>"});
    EXPECT_THROW(fetch_user_log(feed.url(), "alice", quick()), Error);
}

TEST(FetchHttp, RetriesTransientFailures) {
    testing_support::MockFeed feed;
    FeedPage page;
    page.comments.push_back({"bob", "b1", "v", 5, "x", false});
    feed.set_page("bob", "", {to_json(page).dump(), 2}); // two 503s, then the page
    auto res = fetch_user_log(feed.url(), "bob", quick());
    EXPECT_EQ(res.log.size(), 1u);
    EXPECT_EQ(res.requests, 3u);
    EXPECT_EQ(feed.requests(), 3);
}

TEST(FetchHttp, GivesUpAfterThreeRetries) {
    testing_support::MockFeed feed;
    feed.set_page("bob", "", {"{}", 100});
    try {
        fetch_user_log(feed.url(), "bob", quick());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EndpointUnreachable);
    }
    EXPECT_EQ(feed.requests(), 4); // initial attempt plus 3 retries
}

TEST(FetchHttp, UnreachableEndpoint) {
    int port = testing_support::closed_port();
    try {
        fetch_user_log("http://127.0.0.1:" + std::to_string(port), "alice", quick());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EndpointUnreachable);
    }
}

TEST(FetchHttp, PageLimitTruncatesSoftly) {
    testing_support::MockFeed feed;
    feed.serve_user("alice", {10, 10, 10, 10});
    auto opt = quick();
    opt.page_limit = 2;
    auto res = fetch_user_log(feed.url(), "alice", opt);
    EXPECT_TRUE(res.truncated);
    EXPECT_EQ(res.log.size(), 20u);
    EXPECT_EQ(feed.requests(), 2);
}

TEST(FetchHttp, BaseUrlWithPathPrefix) {
    testing_support::MockFeed feed;
    feed.serve_user("alice", {3});
    // trailing slash on the base URL is tolerated
    EXPECT_EQ(fetch_user_log(feed.url() + "/", "alice", quick()).log.size(), 3u);
}

TEST(FetchDirectory, ReadsUserFile) {
    auto dir = temp_dir("feeddir");
    std::ofstream(dir / "u1.jsonl") << kLine2 << "\n" << kLine1 << "\n";
    auto res = fetch_user_log(dir.string(), "u1");
    ASSERT_EQ(res.log.size(), 2u);
    EXPECT_EQ(res.log.records()[0].comment_id, "c1");
    try {
        fetch_user_log(dir.string(), "u9");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UserNotFound);
    }
    try {
        fetch_user_log((dir / "missing").string(), "u1");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EndpointUnreachable);
    }
    std::ofstream(dir / "u2.jsonl") << "garbage\n";
    try {
        fetch_user_log(dir.string(), "u2");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedPage);
    }
}
