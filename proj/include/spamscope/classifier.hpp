#pragma once

#include <span>
#include <vector>

#include "spamscope/model.hpp"

namespace spamscope {

/// Applies the threshold rule. All comparisons are strict; an absent ATDC
/// never fires.
inline Verdict classify(const FeatureVector& fv, const RuleConfig& cfg) {
    Verdict v;
    v.user_id = fv.user_id;
    v.features = fv;
    if (fv.n_comments <= cfg.min_comments) {
        v.label = Label::Insufficient;
        return v;
    }
    if (fv.pchf_pct > cfg.pchf_gt) v.triggered.push_back(Indicator::PCHF);
    if (fv.atdc_s && *fv.atdc_s < cfg.atdc_lt_s) v.triggered.push_back(Indicator::ATDC);
    if (fv.comovp() > cfg.comovp_gt) v.triggered.push_back(Indicator::COMOVP);
    if (fv.vidovp > cfg.vidovp_gt) v.triggered.push_back(Indicator::VIDOVP);
    v.label = v.triggered.empty() ? Label::Legit : Label::Spammer;
    return v;
}

struct LabelCounts {
    std::size_t spammer = 0;
    std::size_t legit = 0;
    std::size_t insufficient = 0;

    std::size_t total() const noexcept { return spammer + legit + insufficient; }
    void add(Label l) noexcept {
        switch (l) {
        case Label::Spammer: ++spammer; break;
        case Label::Legit: ++legit; break;
        case Label::Insufficient: ++insufficient; break;
        }
    }
    bool operator==(const LabelCounts&) const = default;
};

struct BatchResult {
    std::vector<Verdict> verdicts;
    LabelCounts counts;
};

inline BatchResult classify_batch(std::span<const FeatureVector> fvs, const RuleConfig& cfg) {
    BatchResult out;
    out.verdicts.reserve(fvs.size());
    for (const auto& fv : fvs) {
        out.verdicts.push_back(classify(fv, cfg));
        out.counts.add(out.verdicts.back().label);
    }
    return out;
}

} // namespace spamscope
