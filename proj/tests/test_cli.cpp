#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mock_feed.hpp"
#include "spamscope/spamscope.hpp"

using namespace spamscope;
namespace fs = std::filesystem;

namespace {

const std::string kCli = SPAMSCOPE_CLI;
const fs::path kFixtures = SPAMSCOPE_FIXTURES;

struct CliResult {
    int code;
    std::string err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("spamscope-cli-" + std::string(info->name()) + "-" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    CliResult run(const std::string& args) {
        fs::path err = dir_ / "stderr.txt";
        std::string cmd = kCli + " " + args + " >" + (dir_ / "stdout.txt").string() + " 2>" + err.string();
        int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        return s.str();
    }

    static std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

    std::string fixture(const char* name) const { return (kFixtures / name).string(); }
    std::string out(const char* name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, ScoreDefaultConfig) {
    auto r = run("score --input " + fixture("sample.jsonl") + " --output " + out("v.jsonl"));
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(out("v.jsonl")));
    std::vector<Verdict> vs;
    for (std::string line; std::getline(in, line);) vs.push_back(verdict_from_json(json::parse(line)));
    ASSERT_EQ(vs.size(), 3u);
    EXPECT_EQ(vs[0].user_id, "newbie_c");
    EXPECT_EQ(vs[0].label, Label::Insufficient);
    EXPECT_EQ(vs[1].user_id, "spammer_a");
    EXPECT_EQ(vs[1].label, Label::Spammer);
    EXPECT_TRUE(vs[1].fired(Indicator::PCHF));
    EXPECT_TRUE(vs[1].fired(Indicator::ATDC));
    EXPECT_EQ(vs[2].label, Label::Legit);
}

TEST_F(CliTest, ScoreMatchesLibraryComposition) {
    ASSERT_EQ(run("score --input " + fixture("sample.jsonl") + " --output " + out("v.jsonl")).code, 0);
    std::ifstream f(fixture("sample.jsonl"));
    auto parsed = parse_jsonl(f);
    auto logs = group_by_user(parsed.records);
    std::string expected;
    for (const auto& log : logs) expected += to_json_line(classify(feature_vector(log), RuleConfig{})) + "\n";
    EXPECT_EQ(slurp(out("v.jsonl")), expected);
}

TEST_F(CliTest, CsvAndJsonlAgree) {
    ASSERT_EQ(run("score --input " + fixture("sample.jsonl") + " --output " + out("a.jsonl")).code, 0);
    ASSERT_EQ(run("score --input " + fixture("sample.csv") + " --output " + out("b.jsonl")).code, 0);
    ASSERT_EQ(run("score --input " + fixture("sample.csv") + " --format csv --jobs 4 --output " + out("c.jsonl")).code, 0);
    EXPECT_EQ(slurp(out("a.jsonl")), slurp(out("b.jsonl")));
    EXPECT_EQ(slurp(out("a.jsonl")), slurp(out("c.jsonl")));
}

TEST_F(CliTest, ConfigErrors) {
    auto r = run("score --input " + fixture("sample.jsonl") + " --config " + fixture("bad_config.json") +
                 " --output " + out("v.jsonl"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("atdc_lt"), std::string::npos) << r.err;
    EXPECT_EQ(run("score --input " + fixture("sample.jsonl") + " --config " + out("nope.json") + " --output " + out("v.jsonl")).code, 2);
}

TEST_F(CliTest, CustomConfigChangesVerdicts) {
    ASSERT_EQ(run("score --input " + fixture("sample.jsonl") + " --config " + fixture("lenient_config.json") +
                  " --output " + out("v.jsonl")).code, 0);
    auto body = slurp(out("v.jsonl"));
    EXPECT_EQ(body.find("insufficient"), std::string::npos); // min_comments 1 admits newbie_c
}

TEST_F(CliTest, FullyRejectedInput) {
    auto r = run("score --input " + fixture("garbage.jsonl") + " --output " + out("v.jsonl"));
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("AllLinesRejected"), std::string::npos);
}

TEST_F(CliTest, PartialRejectsWarn) {
    std::ofstream(out("mixed.jsonl")) << slurp(fixture("sample.jsonl")) << "garbage line\n";
    auto r = run("score --input " + out("mixed.jsonl") + " --output " + out("v.jsonl"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find(":18:"), std::string::npos) << r.err;
    EXPECT_EQ(lines(slurp(out("v.jsonl"))), 3u);
}

TEST_F(CliTest, MissingInputIsIoFailure) {
    EXPECT_EQ(run("score --input " + out("absent.jsonl") + " --output " + out("v.jsonl")).code, 4);
}

TEST_F(CliTest, ExplainGoesToStderr) {
    auto r = run("score --explain --input " + fixture("sample.jsonl") + " --output " + out("v.jsonl"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("spammer_a spammer n=8 PCHF=87.5>70:fired"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("newbie_c insufficient"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("score --input x").code, 1);
    EXPECT_EQ(run("score --input x --output y --normalization fuzzy").code, 1);
}

TEST_F(CliTest, HelpListsDefaults) {
    auto r = run("--help");
    EXPECT_EQ(r.code, 0);
    auto help = slurp(dir_ / "stdout.txt");
    EXPECT_NE(help.find("PCHF > 70"), std::string::npos);
    EXPECT_NE(help.find("ATDC < 150"), std::string::npos);
    EXPECT_NE(help.find("COMOVP > 0.60"), std::string::npos);
    EXPECT_NE(help.find("VIDOVP > 0.60"), std::string::npos);
    run("fetch --help");
    EXPECT_NE(slurp(dir_ / "stdout.txt").find("20"), std::string::npos); // page-limit default
}

TEST_F(CliTest, SynthDeterministic) {
    ASSERT_EQ(run("synth --seed 42 --out " + out("a/corpus.jsonl")).code, 0);
    ASSERT_EQ(run("synth --seed 42 --out " + out("b/corpus.jsonl")).code, 0);
    EXPECT_EQ(slurp(out("a/corpus.jsonl")), slurp(out("b/corpus.jsonl")));
    EXPECT_EQ(slurp(out("a/corpus.truth.json")), slurp(out("b/corpus.truth.json")));
    auto truth = truth_from_json(json::parse(slurp(out("a/corpus.truth.json"))));
    EXPECT_EQ(truth.size(), 200u);
}

TEST_F(CliTest, SynthSpecErrors) {
    std::ofstream(out("spec.json")) << R"({"personas":[{"kind":"bot","count":2,"colour":"red"}]})";
    EXPECT_EQ(run("synth --spec " + out("spec.json") + " --out " + out("c.jsonl")).code, 2);
    std::ofstream(out("ok.json")) << R"({"personas":[{"kind":"legit","count":2},{"kind":"flagged","count":1}]})";
    ASSERT_EQ(run("synth --spec " + out("ok.json") + " --seed 3 --out " + out("c.jsonl")).code, 0);
    EXPECT_EQ(truth_from_json(json::parse(slurp(out("c.truth.json")))).size(), 3u);
}

TEST_F(CliTest, ReportSelectedFigures) {
    ASSERT_EQ(run("synth --seed 42 --out " + out("corpus.jsonl")).code, 0);
    ASSERT_EQ(run("report --input " + out("corpus.jsonl") + " --figures fig2,fig5 --outdir " + out("figs")).code, 0);
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir_ / "figs")) names.insert(e.path().filename().string());
    EXPECT_EQ(names, (std::set<std::string>{"fig2.csv", "fig5.csv", "summary.json"}));

    ASSERT_EQ(run("report --input " + out("corpus.jsonl") + " --svg --outdir " + out("all")).code, 0);
    for (const char* f : {"fig2.csv", "fig3.csv", "fig4.csv", "fig5.csv", "fig6.csv", "fig2.svg", "fig3.svg",
                          "fig4.svg", "fig5.svg", "summary.json"})
        EXPECT_TRUE(fs::exists(dir_ / "all" / f)) << f;
    EXPECT_FALSE(fs::exists(dir_ / "all" / "fig6.svg"));
}

TEST_F(CliTest, ReportUnknownFigure) {
    EXPECT_EQ(run("report --input " + fixture("sample.jsonl") + " --figures fig9 --outdir " + out("f")).code, 1);
}

TEST_F(CliTest, FetchFromDirectory) {
    fs::create_directories(dir_ / "feed");
    std::ifstream f(fixture("sample.jsonl"));
    auto logs = group_by_user(parse_jsonl(f).records);
    for (const auto& log : logs) cache_put(dir_ / "feed", log);

    std::ofstream(out("users.txt")) << "spammer_a\nviewer_b\nnewbie_c\n";
    ASSERT_EQ(run("fetch --endpoint " + out("feed") + " --users " + out("users.txt") + " --cache " + out("cache")).code, 0);
    for (const auto& log : logs) EXPECT_EQ(cache_get(dir_ / "cache", log.user_id()), log);

    std::ofstream(out("users2.txt")) << "spammer_a\nghost\nviewer_b\n";
    auto r = run("fetch --endpoint " + out("feed") + " --users " + out("users2.txt") + " --cache " + out("cache2"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("ghost"), std::string::npos);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_ / "cache2")) ++files;
    EXPECT_EQ(files, 2u);
}

TEST_F(CliTest, FetchFromHttpFeed) {
    testing_support::MockFeed feed;
    feed.serve_user("alice", {40, 40, 20});
    feed.serve_user("bob", {5});
    std::ofstream(out("users.txt")) << "alice\n\n# comment\nbob\n";
    ASSERT_EQ(run("fetch --jobs 2 --endpoint " + feed.url() + " --users " + out("users.txt") + " --cache " + out("cache")).code, 0);
    EXPECT_EQ(cache_get(dir_ / "cache", "alice")->size(), 100u);
    EXPECT_EQ(cache_get(dir_ / "cache", "bob")->size(), 5u);

    auto r = run("fetch --page-limit 2 --endpoint " + feed.url() + " --users " + out("users.txt") + " --cache " + out("c2"));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("truncated"), std::string::npos);
    EXPECT_EQ(cache_get(dir_ / "c2", "alice")->size(), 80u);
}

TEST_F(CliTest, FetchUnreachable) {
    std::ofstream(out("users.txt")) << "alice\n";
    int port = testing_support::closed_port();
    auto r = run("fetch --endpoint http://127.0.0.1:" + std::to_string(port) + " --users " + out("users.txt") +
                 " --cache " + out("cache"));
    EXPECT_EQ(r.code, 4);
    EXPECT_EQ(run("fetch --endpoint " + out("no-such-dir") + " --users " + out("users.txt") + " --cache " + out("cache")).code, 4);
}
