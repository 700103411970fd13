// spamscope: score forum users as comment spammers from their activity logs.
//
//   spamscope score  --input comments.jsonl --output verdicts.jsonl
//   spamscope fetch  --endpoint http://host:8080 --users users.txt --cache cache/
//   spamscope synth  --seed 42 --out corpus.jsonl
//   spamscope report --input comments.jsonl --outdir figs/ --svg

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spamscope/spamscope.hpp"

namespace fs = std::filesystem;
using namespace spamscope;

namespace {

enum Exit : int {
    kOk = 0,
    kUsage = 1,
    kConfig = 2,
    kRejected = 3,
    kIo = 4,
};

struct InputOptions {
    std::string path;
    std::string format; // empty: infer from extension
    std::string config;
    std::string normalization = "canonical";
};

/// Exit status carried out of a failing step.
struct Failure {
    int code;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.path, "Comment log (JSON-Lines or CSV)")->required();
    cmd->add_option("--format", in.format, "jsonl or csv (default: from file extension)")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    cmd->add_option("--config", in.config, "Rule config JSON (default: built-in thresholds)");
    cmd->add_option("--normalization", in.normalization, "Text matching for repetition indicators")
        ->check(CLI::IsMember({"canonical", "raw-bytes"}))
        ->capture_default_str();
}

Normalization normalization_of(const InputOptions& in) {
    return in.normalization == "raw-bytes" ? Normalization::RawBytes : Normalization::Canonical;
}

RuleConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream f(path);
    if (!f) {
        std::cerr << "error: cannot read config " << path << "\n";
        throw Failure{kConfig};
    }
    try {
        return rule_config_from_json(json::parse(f));
    } catch (const json::exception& e) {
        std::cerr << "error: config " << path << ": " << e.what() << "\n";
    } catch (const Error& e) {
        std::cerr << "error: config " << path << ": " << e.what() << "\n";
    }
    throw Failure{kConfig};
}

std::vector<CommentRecord> load_records(const InputOptions& in) {
    std::ifstream f(in.path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot read " << in.path << "\n";
        throw Failure{kIo};
    }
    std::string format = in.format;
    if (format.empty()) format = fs::path(in.path).extension() == ".csv" ? "csv" : "jsonl";
    try {
        ParseResult parsed = format == "csv" ? parse_csv(f) : parse_jsonl(f);
        for (const auto& r : parsed.report.rejects)
            std::cerr << "warning: " << in.path << ":" << r.line << ": " << to_string(r.error) << ": "
                      << r.detail << "\n";
        if (parsed.report.rejected > 0)
            std::cerr << "warning: " << parsed.report.rejected << " of "
                      << parsed.report.accepted + parsed.report.rejected << " records rejected\n";
        return std::move(parsed.records);
    } catch (const IngestError& e) {
        for (const auto& r : e.report().rejects)
            std::cerr << "warning: " << in.path << ":" << r.line << ": " << to_string(r.error) << "\n";
        std::cerr << "error: " << in.path << ": " << e.what() << "\n";
    } catch (const Error& e) {
        std::cerr << "error: " << in.path << ": " << e.what() << "\n";
    }
    throw Failure{kRejected};
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "error: cannot write " << path.string() << "\n";
        throw Failure{kIo};
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    auto out = open_output(path);
    out << content;
    if (!out.flush()) {
        std::cerr << "error: write failed for " << path.string() << "\n";
        throw Failure{kIo};
    }
}

std::string explain_line(const Verdict& v, const RuleConfig& cfg) {
    const auto& f = v.features;
    std::ostringstream s;
    s << v.user_id << " " << to_string(v.label) << " n=" << f.n_comments;
    if (v.label == Label::Insufficient) {
        s << " (gate: n > " << cfg.min_comments << ")";
        return s.str();
    }
    auto clause = [&](Indicator i, const std::string& value, const char* op, double threshold) {
        s << " " << to_string(i) << "=" << value << op << format_number(threshold)
          << (v.fired(i) ? ":fired" : ":no");
    };
    clause(Indicator::PCHF, format_number(f.pchf_pct), ">", cfg.pchf_gt);
    clause(Indicator::ATDC, f.atdc_s ? format_number(*f.atdc_s) : "absent", "<", cfg.atdc_lt_s);
    clause(Indicator::COMOVP, format_number(f.crr), ">", cfg.comovp_gt);
    clause(Indicator::VIDOVP, format_number(f.vidovp), ">", cfg.vidovp_gt);
    s << " CRAV=" << format_number(f.crav);
    return s.str();
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
    InputOptions in;
    std::string output;
    bool explain = false;
    unsigned jobs = 1;
};

int run_score(const ScoreArgs& a) {
    RuleConfig cfg = load_config(a.in.config);
    auto records = load_records(a.in);
    auto verdicts = score_records(std::move(records), cfg, normalization_of(a.in), a.jobs);

    std::string body;
    for (const auto& v : verdicts) body += to_json_line(v) + "\n";
    if (a.output.empty() || a.output == "-") {
        std::cout << body << std::flush;
    } else {
        write_file(a.output, body);
    }
    if (a.explain)
        for (const auto& v : verdicts) std::cerr << explain_line(v, cfg) << "\n";
    return kOk;
}

struct FetchArgs {
    std::string endpoint;
    std::string users;
    std::string cache;
    std::size_t page_limit = 20;
    unsigned jobs = 1;
};

int run_fetch(const FetchArgs& a) {
    std::ifstream f(a.users);
    if (!f) {
        std::cerr << "error: cannot read users file " << a.users << "\n";
        return kIo;
    }
    std::vector<std::string> users;
    for (std::string line; std::getline(f, line);) {
        auto id = std::string(detail::trim_ascii(line));
        if (!id.empty() && id[0] != '#') users.push_back(id);
    }

    FetchOptions opt;
    opt.page_limit = a.page_limit;
    std::vector<std::string> failures(users.size());
    std::vector<std::string> warnings(users.size());
    parallel_for(users.size(), a.jobs, [&](std::size_t i) {
        try {
            auto res = fetch_user_log(a.endpoint, users[i], opt);
            cache_put(a.cache, res.log);
            if (res.truncated)
                warnings[i] = "page limit " + std::to_string(a.page_limit) + " reached, log truncated at " +
                              std::to_string(res.log.size()) + " records";
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    });

    std::size_t failed = 0;
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (!warnings[i].empty()) std::cerr << "warning: " << users[i] << ": " << warnings[i] << "\n";
        if (!failures[i].empty()) {
            ++failed;
            std::cerr << "warning: " << users[i] << ": " << failures[i] << "\n";
        }
    }
    std::cerr << "fetched " << users.size() - failed << " of " << users.size() << " users\n";
    return !users.empty() && failed == users.size() ? kIo : kOk;
}

struct SynthArgs {
    std::string spec;
    std::uint64_t seed = 42;
    std::string out;
};

fs::path truth_path_for(const fs::path& out) {
    fs::path p = out;
    p.replace_extension();
    p += ".truth.json";
    return p;
}

int run_synth(const SynthArgs& a) {
    std::vector<PersonaSpec> specs = benchmark_personas();
    if (!a.spec.empty()) {
        std::ifstream f(a.spec);
        if (!f) {
            std::cerr << "error: cannot read spec " << a.spec << "\n";
            return kConfig;
        }
        try {
            specs = persona_specs_from_json(json::parse(f));
        } catch (const std::exception& e) {
            std::cerr << "error: spec " << a.spec << ": " << e.what() << "\n";
            return kConfig;
        }
    }
    LabeledCorpus corpus;
    try {
        corpus = generate(specs, a.seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    std::ostringstream body;
    write_jsonl(body, corpus.records);
    write_file(a.out, body.str());
    write_file(truth_path_for(a.out), truth_to_json(corpus).dump(2) + "\n");
    std::cerr << "wrote " << corpus.records.size() << " comments for " << corpus.truth.size() << " users ("
              << corpus.spammers() << " spammers)\n";
    return kOk;
}

struct ReportArgs {
    InputOptions in;
    std::vector<std::string> figures;
    std::string outdir;
    bool svg = false;
};

int run_report(const ReportArgs& a) {
    std::vector<FigureId> figs;
    if (a.figures.empty()) figs.assign(std::begin(kAllFigures), std::end(kAllFigures));
    for (const auto& name : a.figures) {
        auto f = figure_from_string(name);
        if (!f) {
            std::cerr << "error: unknown figure '" << name << "' (expected fig2..fig6)\n";
            return kUsage;
        }
        figs.push_back(*f);
    }
    RuleConfig cfg = load_config(a.in.config);
    auto logs = group_by_user(load_records(a.in));
    auto fvs = compute_features(logs, normalization_of(a.in));
    auto verdicts = classify_batch(fvs, cfg).verdicts;

    fs::path dir(a.outdir);
    for (FigureId f : figs) {
        auto ds = figure_dataset(fvs, f, cfg);
        write_file(dir / (std::string(to_string(f)) + ".csv"), to_csv(ds));
        if (a.svg && ds.columns.size() == 2)
            write_file(dir / (std::string(to_string(f)) + ".svg"), svg_scatter(ds));
    }
    write_file(dir / "summary.json", to_json(summarize(verdicts)).dump(2) + "\n");
    return kOk;
}

const char* kRuleFooter =
    "Spammer rule (defaults): users with more than 5 comments are labelled spammer when\n"
    "  PCHF > 70 (percent of comments with the spam-hint flag)\n"
    "  OR ATDC < 150 (mean seconds between all pairs of comments)\n"
    "  OR COMOVP > 0.60 (pairwise exact-text repetition, same as CRR)\n"
    "  OR VIDOVP > 0.60 (pairwise different-video rate).\n"
    "Exit codes: 0 ok, 1 usage, 2 config, 3 input fully rejected, 4 endpoint/IO failure.";

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detect forum comment spammers from user activity logs"};
    app.footer(kRuleFooter);
    app.require_subcommand(1);

    ScoreArgs score;
    auto* score_cmd = app.add_subcommand("score", "Classify every user in a comment log");
    add_input_options(score_cmd, score.in);
    score_cmd->add_option("--output", score.output, "Verdict JSON-Lines file ('-' for stdout)")->required();
    score_cmd->add_flag("--explain", score.explain, "Print per-user clause values to stderr");
    score_cmd->add_option("--jobs", score.jobs, "Worker threads (0 = all cores)")->capture_default_str();

    FetchArgs fetch;
    auto* fetch_cmd = app.add_subcommand("fetch", "Download user logs from a paged feed into a cache");
    fetch_cmd->add_option("--endpoint", fetch.endpoint, "http:// base URL or directory of {user}.jsonl")->required();
    fetch_cmd->add_option("--users", fetch.users, "File with one user_id per line")->required();
    fetch_cmd->add_option("--cache", fetch.cache, "Cache directory")->required();
    fetch_cmd->add_option("--page-limit", fetch.page_limit, "Maximum pages per user")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fetch_cmd->add_option("--jobs", fetch.jobs, "Users fetched concurrently")->capture_default_str();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a labelled synthetic corpus");
    synth_cmd->add_option("--spec", synth.spec, "Persona spec JSON (default: 100 legit + 25 of each spam persona)");
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Corpus JSON-Lines path; truth goes to {stem}.truth.json")->required();

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Write figure datasets, plots and a summary");
    add_input_options(report_cmd, report.in);
    report_cmd->add_option("--figures", report.figures, "Comma-separated subset of fig2,fig3,fig4,fig5,fig6")
        ->delimiter(',');
    report_cmd->add_option("--outdir", report.outdir, "Output directory")->required();
    report_cmd->add_flag("--svg", report.svg, "Also write SVG scatter plots (fig2-fig5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*score_cmd) return run_score(score);
        if (*fetch_cmd) return run_fetch(fetch);
        if (*synth_cmd) return run_synth(synth);
        if (*report_cmd) return run_report(report);
    } catch (const Failure& f) {
        return f.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::IoError ? kIo : kConfig;
    }
    return kUsage;
}
