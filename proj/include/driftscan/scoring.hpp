#pragma once

#include <optional>
#include <string>
#include <vector>

#include "driftscan/snapshot.hpp"

namespace driftscan {

struct ScoringConfig {
    int k = 25;               // neighbors per second-order vector
    int pool = 500;           // candidate pool ranked before filtering
    int min_components = 2;   // cosine of shorter vectors is degenerate
    TokenFilter filter;

    void validate() const;  // 1 <= k <= pool, min_components >= 2
};

struct Neighbor {
    std::string token;
    double similarity;
};

struct NeighborList {
    std::string token;
    Month month;
    std::vector<Neighbor> neighbors;  // similarity non-increasing, ties by token
};

// Ranks the `pool` nearest tokens by cosine over the full vocabulary (target
// excluded), drops tokens the filter rejects, returns the top k survivors.
// Ties break lexicographically. Throws if the token is absent.
NeighborList top_k_neighbors(const EmbeddingSnapshot& snapshot, const std::string& token,
                             const ScoringConfig& config);

struct SecondOrderPair {
    std::string token;
    Month anchor_month;
    Month current_month;
    // Union of the token's k-NN at both months, restricted to tokens present
    // in both vocabularies, sorted lexicographically. Both component arrays
    // share this index.
    std::vector<std::string> index;
    std::vector<double> anchor_components;
    std::vector<double> current_components;
};

// Throws if the token is absent from either snapshot or the shared index has
// fewer than min_components entries.
SecondOrderPair second_order_pair(const EmbeddingSnapshot& anchor, const EmbeddingSnapshot& at,
                                  const std::string& token, const ScoringConfig& config);

enum class MissingReason { None, TokenAbsent, TooFewComponents, ZeroProfile };

const char* missing_reason_name(MissingReason r);
MissingReason missing_reason_from_name(const std::string& name);

struct ScoreResult {
    std::optional<double> score;  // 1 - cosine of the two second-order vectors, in [0,2]
    int components = 0;
    MissingReason reason = MissingReason::None;
};

// Never throws for per-pair conditions; they surface as MISSING with a reason.
ScoreResult change_score(const EmbeddingSnapshot& anchor, const EmbeddingSnapshot& at,
                         const std::string& token, const ScoringConfig& config);

struct SeriesPoint {
    Month month;
    std::optional<double> score;
    int components = 0;
    MissingReason reason = MissingReason::None;
};

struct ChangeSeries {
    std::string token;
    Month anchor_month;                // first month with an embedding
    std::vector<SeriesPoint> points;   // months strictly increasing; absent months omitted
};

// Anchor = first month containing the token; one point per later month where
// the token appears. Throws if the token appears in no snapshot.
ChangeSeries change_series(const TemporalDataset& dataset, const std::string& token,
                           const ScoringConfig& config);

struct ScoredToken {
    std::string token;
    std::optional<ChangeSeries> series;
    std::string error;  // set when series is empty
};

// Batch scoring over many targets. The parallel kernel partitions by token;
// every per-token computation is independent, so its output is bit-identical
// to the serial reference regardless of thread count.
std::vector<ScoredToken> score_all_serial(const TemporalDataset& dataset,
                                          const std::vector<std::string>& tokens,
                                          const ScoringConfig& config);
std::vector<ScoredToken> score_all_parallel(const TemporalDataset& dataset,
                                            const std::vector<std::string>& tokens,
                                            const ScoringConfig& config);
std::vector<ScoredToken> score_all(const TemporalDataset& dataset,
                                   const std::vector<std::string>& tokens,
                                   const ScoringConfig& config, bool parallel);

// Series export: token,anchor_month,month,score,components,reason with
// MISSING rendered as an empty score plus the reason.
std::string series_to_csv(const ChangeSeries& series);
ChangeSeries series_from_csv(const std::string& text);

}  // namespace driftscan
