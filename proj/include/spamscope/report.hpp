#pragma once

// Figure datasets, CSV/SVG emission and corpus summaries. All output is
// byte-stable for a given input.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spamscope/classifier.hpp"
#include "spamscope/model.hpp"

namespace spamscope {

enum class FigureId { Fig2, Fig3, Fig4, Fig5, Fig6 };

inline constexpr FigureId kAllFigures[] = {FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5,
                                           FigureId::Fig6};

constexpr std::string_view to_string(FigureId f) noexcept {
    switch (f) {
    case FigureId::Fig2: return "fig2";
    case FigureId::Fig3: return "fig3";
    case FigureId::Fig4: return "fig4";
    case FigureId::Fig5: return "fig5";
    case FigureId::Fig6: return "fig6";
    }
    return "?";
}

inline std::optional<FigureId> figure_from_string(std::string_view s) {
    for (FigureId f : kAllFigures)
        if (to_string(f) == s) return f;
    return std::nullopt;
}

struct FigureDataset {
    FigureId id = FigureId::Fig2;
    std::vector<std::string> columns;
    std::vector<std::string> user_ids; // parallel to rows
    std::vector<std::vector<double>> rows;
};

inline std::vector<std::string> figure_columns(FigureId f) {
    switch (f) {
    case FigureId::Fig2: return {"n_comments", "pchf_pct"};
    case FigureId::Fig3: return {"crr", "pchf_pct"};
    case FigureId::Fig4: return {"vidovp", "crr"};
    case FigureId::Fig5: return {"n_comments", "log10_atdc"};
    case FigureId::Fig6: return {"log10_atdc", "n_comments", "pchf_pct"};
    }
    return {};
}

/// log10 of ATDC seconds. Timestamps have one-second resolution, so means
/// below one second are floored to 1s (log value 0) rather than -inf.
inline double log10_atdc(double atdc_s) { return std::log10(std::max(atdc_s, 1.0)); }

/// Keeps users above the comment gate, in input order; fig5/fig6 also drop
/// users without an ATDC value.
inline FigureDataset figure_dataset(std::span<const FeatureVector> fvs, FigureId id,
                                    const RuleConfig& cfg = {}) {
    FigureDataset ds;
    ds.id = id;
    ds.columns = figure_columns(id);
    const bool needs_atdc = id == FigureId::Fig5 || id == FigureId::Fig6;
    for (const auto& fv : fvs) {
        if (fv.n_comments <= cfg.min_comments) continue;
        if (needs_atdc && !fv.atdc_s) continue;
        const double n = static_cast<double>(fv.n_comments);
        std::vector<double> row;
        switch (id) {
        case FigureId::Fig2: row = {n, fv.pchf_pct}; break;
        case FigureId::Fig3: row = {fv.crr, fv.pchf_pct}; break;
        case FigureId::Fig4: row = {fv.vidovp, fv.crr}; break;
        case FigureId::Fig5: row = {n, log10_atdc(*fv.atdc_s)}; break;
        case FigureId::Fig6: row = {log10_atdc(*fv.atdc_s), n, fv.pchf_pct}; break;
        }
        ds.user_ids.push_back(fv.user_id);
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

/// At most six fractional digits, trailing zeros dropped.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

inline std::string to_csv(const FigureDataset& ds) {
    std::string out = "user_id";
    for (const auto& c : ds.columns) out += "," + c;
    out += '\n';
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        out += detail::csv_field(ds.user_ids[i]);
        for (double v : ds.rows[i]) out += "," + format_number(v);
        out += '\n';
    }
    return out;
}

/// 800x600 scatter plot of a two-column dataset.
inline std::string svg_scatter(const FigureDataset& ds) {
    if (ds.columns.size() != 2)
        throw Error(ErrorCode::Unsupported, std::string(to_string(ds.id)), "scatter needs two columns");

    constexpr double W = 800, H = 600;
    constexpr double left = 80, right = 30, top = 40, bottom = 70;
    constexpr double x0 = left, x1 = W - right, y0 = H - bottom, y1 = top;

    auto bounds = [&](std::size_t col) {
        double lo = 0, hi = 1;
        if (!ds.rows.empty()) {
            lo = hi = ds.rows[0][col];
            for (const auto& r : ds.rows) {
                lo = std::min(lo, r[col]);
                hi = std::max(hi, r[col]);
            }
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        return std::pair{lo, hi};
    };
    auto [xlo, xhi] = bounds(0);
    auto [ylo, yhi] = bounds(1);
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    s << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << to_string(ds.id) << ": " << detail::xml_escape(ds.columns[1]) << " vs "
      << detail::xml_escape(ds.columns[0]) << "</text>\n";
    s << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y0)
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(y1)
      << "\" stroke=\"black\"/>\n";

    s << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 + 18) << "\" text-anchor=\"start\">"
      << format_number(xlo) << "</text>\n";
    s << "<text x=\"" << fmt(x1) << "\" y=\"" << fmt(y0 + 18) << "\" text-anchor=\"end\">"
      << format_number(xhi) << "</text>\n";
    s << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(y0) << "\" text-anchor=\"end\">"
      << format_number(ylo) << "</text>\n";
    s << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(y1 + 10) << "\" text-anchor=\"end\">"
      << format_number(yhi) << "</text>\n";
    s << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(H - 25) << "\" text-anchor=\"middle\">"
      << detail::xml_escape(ds.columns[0]) << "</text>\n";
    s << "<text x=\"20\" y=\"" << fmt((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << fmt((y0 + y1) / 2) << ")\">" << detail::xml_escape(ds.columns[1]) << "</text>\n";
    s << "</g>\n";

    s << "<g fill=\"steelblue\" fill-opacity=\"0.7\">\n";
    for (const auto& r : ds.rows) {
        double cx = x0 + (r[0] - xlo) / (xhi - xlo) * (x1 - x0);
        double cy = y0 - (r[1] - ylo) / (yhi - ylo) * (y0 - y1);
        s << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"3\"/>\n";
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

// ---------------------------------------------------------------------------
// Summaries

struct Summary {
    std::size_t users = 0;
    std::size_t total_comments = 0;
    LabelCounts labels;
    std::map<Indicator, std::size_t> by_indicator; // every indicator present, possibly 0
};

inline Summary summarize(std::span<const Verdict> verdicts) {
    Summary s;
    for (Indicator i : kAllIndicators) s.by_indicator[i] = 0;
    std::map<std::string_view, bool> seen;
    for (const auto& v : verdicts) {
        seen[v.user_id] = true;
        s.total_comments += v.features.n_comments;
        s.labels.add(v.label);
        for (Indicator i : v.triggered) ++s.by_indicator[i];
    }
    s.users = seen.size();
    return s;
}

inline ordered_json to_json(const Summary& s) {
    ordered_json j;
    j["users"] = s.users;
    j["total_comments"] = s.total_comments;
    j["labels"] = {{"spammer", s.labels.spammer}, {"legit", s.labels.legit}, {"insufficient", s.labels.insufficient}};
    ordered_json ind = ordered_json::object();
    for (Indicator i : kAllIndicators) ind[std::string(to_string(i))] = s.by_indicator.at(i);
    j["triggered"] = std::move(ind);
    return j;
}

/// Detector quality against ground truth. A verdict counts as a positive
/// only when labelled Spammer. Truth users without a verdict count as
/// negatives; verdicts for users outside `truth` are ignored.
struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
    double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
};

inline Confusion evaluate(std::span<const Verdict> verdicts, const std::map<std::string, Label>& truth) {
    std::map<std::string_view, Label> predicted;
    for (const auto& v : verdicts) predicted[v.user_id] = v.label;
    Confusion c;
    for (const auto& [user, label] : truth) {
        auto it = predicted.find(user);
        bool flagged = it != predicted.end() && it->second == Label::Spammer;
        bool actual = label == Label::Spammer;
        if (flagged && actual) ++c.tp;
        else if (flagged) ++c.fp;
        else if (actual) ++c.fn;
        else ++c.tn;
    }
    return c;
}

} // namespace spamscope
