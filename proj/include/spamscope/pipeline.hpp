#pragma once

#include <span>
#include <vector>

#include "spamscope/classifier.hpp"
#include "spamscope/features.hpp"
#include "spamscope/ingest.hpp"
#include "spamscope/parallel.hpp"

namespace spamscope {

/// Feature vectors in the same order as `logs`, whatever the thread count.
inline std::vector<FeatureVector> compute_features(std::span<const UserActivityLog> logs,
                                                   Normalization mode = Normalization::Canonical,
                                                   unsigned jobs = 1) {
    std::vector<FeatureVector> out(logs.size());
    parallel_for(logs.size(), jobs, [&](std::size_t i) { out[i] = feature_vector(logs[i], mode); });
    return out;
}

/// Groups, extracts features and classifies. Verdicts are ordered by user_id.
inline std::vector<Verdict> score_records(std::vector<CommentRecord> records, const RuleConfig& cfg,
                                          Normalization mode = Normalization::Canonical,
                                          unsigned jobs = 1) {
    auto logs = group_by_user(std::move(records));
    auto fvs = compute_features(logs, mode, jobs);
    return classify_batch(fvs, cfg).verdicts;
}

} // namespace spamscope
