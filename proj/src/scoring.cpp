#include "driftscan/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"

namespace driftscan {

void ScoringConfig::validate() const {
    if (k < 1) throw Error("scoring config: k must be >= 1");
    if (pool < k) throw Error("scoring config: pool must be >= k");
    if (min_components < 2) throw Error("scoring config: min_components must be >= 2");
}

namespace {

// Raw similarity used for ranking. Deliberately the plain dot/(|u||v|)
// expression with no shortcuts so the naive full-scan oracle lands on the
// same bits, tie-breaks included.
inline double similarity(const EmbeddingSnapshot& s, int a, int b) {
    auto u = s.vector_at(a);
    auto v = s.vector_at(b);
    double dot = 0.0;
    for (size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    return dot / (s.norm_at(a) * s.norm_at(b));
}

NeighborList top_k_impl(const EmbeddingSnapshot& s, int target, const ScoringConfig& cfg) {
    const int n = s.size();
    std::vector<double> sim(n);
    std::vector<int> order;
    order.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        if (i == target) continue;
        sim[i] = similarity(s, target, i);
        order.push_back(i);
    }
    // Tokens are stored sorted, so index order is lexicographic token order.
    auto better = [&](int a, int b) { return sim[a] > sim[b] || (sim[a] == sim[b] && a < b); };
    int pool_n = std::min<int>(cfg.pool, static_cast<int>(order.size()));
    std::partial_sort(order.begin(), order.begin() + pool_n, order.end(), better);

    NeighborList out{s.token_at(target), s.month(), {}};
    out.neighbors.reserve(cfg.k);
    for (int p = 0; p < pool_n && static_cast<int>(out.neighbors.size()) < cfg.k; ++p) {
        const std::string& tok = s.token_at(order[p]);
        if (cfg.filter.rejects(tok)) continue;
        out.neighbors.push_back({tok, sim[order[p]]});
    }
    return out;
}

// Cosine between two second-order vectors. Bit-identical inputs must give
// exactly 1 (the anchor law depends on it); otherwise plain formula, clamped.
double second_order_cosine(const std::vector<double>& a, const std::vector<double>& b,
                           bool& zero_profile) {
    zero_profile = false;
    if (a == b) {
        double sq = 0.0;
        for (double x : a) sq += x * x;
        if (sq == 0.0) zero_profile = true;
        return 1.0;
    }
    double dot = 0.0, aa = 0.0, bb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) {
        zero_profile = true;
        return 1.0;
    }
    return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

struct PairOutcome {
    SecondOrderPair pair;
    MissingReason reason = MissingReason::None;
};

PairOutcome build_pair(const EmbeddingSnapshot& anchor, const NeighborList& anchor_nn,
                       const EmbeddingSnapshot& at, const std::string& token,
                       const ScoringConfig& cfg) {
    PairOutcome out;
    out.pair.token = token;
    out.pair.anchor_month = anchor.month();
    out.pair.current_month = at.month();

    int ta = anchor.find_index(token);
    int tt = at.find_index(token);
    if (ta < 0 || tt < 0) {
        out.reason = MissingReason::TokenAbsent;
        return out;
    }
    NeighborList current_nn = top_k_impl(at, tt, cfg);

    // Union of both k-NN lists, kept only where the neighbor exists in both
    // vocabularies, sorted lexicographically.
    std::vector<std::string> index;
    index.reserve(anchor_nn.neighbors.size() + current_nn.neighbors.size());
    for (const auto& nb : anchor_nn.neighbors)
        if (at.contains(nb.token)) index.push_back(nb.token);
    for (const auto& nb : current_nn.neighbors)
        if (anchor.contains(nb.token)) index.push_back(nb.token);
    std::sort(index.begin(), index.end());
    index.erase(std::unique(index.begin(), index.end()), index.end());

    if (static_cast<int>(index.size()) < cfg.min_components) {
        out.pair.index = std::move(index);
        out.reason = MissingReason::TooFewComponents;
        return out;
    }

    out.pair.anchor_components.reserve(index.size());
    out.pair.current_components.reserve(index.size());
    for (const auto& nb : index) {
        int ia = anchor.find_index(nb);
        int it = at.find_index(nb);
        out.pair.anchor_components.push_back(
            std::clamp(similarity(anchor, ta, ia), -1.0, 1.0));
        out.pair.current_components.push_back(std::clamp(similarity(at, tt, it), -1.0, 1.0));
    }
    out.pair.index = std::move(index);
    return out;
}

ScoreResult score_from_outcome(PairOutcome&& outcome) {
    ScoreResult r;
    r.components = static_cast<int>(outcome.pair.index.size());
    if (outcome.reason != MissingReason::None) {
        r.reason = outcome.reason;
        return r;
    }
    bool zero_profile = false;
    double c = second_order_cosine(outcome.pair.anchor_components,
                                   outcome.pair.current_components, zero_profile);
    if (zero_profile) {
        r.reason = MissingReason::ZeroProfile;
        return r;
    }
    r.score = 1.0 - c;
    return r;
}

}  // namespace

NeighborList top_k_neighbors(const EmbeddingSnapshot& snapshot, const std::string& token,
                             const ScoringConfig& config) {
    config.validate();
    int t = snapshot.find_index(token);
    if (t < 0) throw Error("token '" + token + "' not in snapshot " + snapshot.month().str());
    return top_k_impl(snapshot, t, config);
}

const char* missing_reason_name(MissingReason r) {
    switch (r) {
        case MissingReason::None: return "";
        case MissingReason::TokenAbsent: return "token_absent";
        case MissingReason::TooFewComponents: return "too_few_components";
        case MissingReason::ZeroProfile: return "zero_profile";
    }
    return "";
}

MissingReason missing_reason_from_name(const std::string& name) {
    if (name.empty()) return MissingReason::None;
    if (name == "token_absent") return MissingReason::TokenAbsent;
    if (name == "too_few_components") return MissingReason::TooFewComponents;
    if (name == "zero_profile") return MissingReason::ZeroProfile;
    throw Error("unknown missing reason '" + name + "'");
}

SecondOrderPair second_order_pair(const EmbeddingSnapshot& anchor, const EmbeddingSnapshot& at,
                                  const std::string& token, const ScoringConfig& config) {
    config.validate();
    int ta = anchor.find_index(token);
    if (ta < 0) throw Error("token '" + token + "' not in snapshot " + anchor.month().str());
    if (!at.contains(token))
        throw Error("token '" + token + "' not in snapshot " + at.month().str());
    auto outcome = build_pair(anchor, top_k_impl(anchor, ta, config), at, token, config);
    if (outcome.reason == MissingReason::TooFewComponents)
        throw Error("second-order index for '" + token + "' has " +
                    std::to_string(outcome.pair.index.size()) + " components, need " +
                    std::to_string(config.min_components));
    return std::move(outcome.pair);
}

ScoreResult change_score(const EmbeddingSnapshot& anchor, const EmbeddingSnapshot& at,
                         const std::string& token, const ScoringConfig& config) {
    config.validate();
    int ta = anchor.find_index(token);
    if (ta < 0 || !at.contains(token)) {
        ScoreResult r;
        r.reason = MissingReason::TokenAbsent;
        return r;
    }
    return score_from_outcome(build_pair(anchor, top_k_impl(anchor, ta, config), at, token, config));
}

ChangeSeries change_series(const TemporalDataset& dataset, const std::string& token,
                           const ScoringConfig& config) {
    config.validate();
    size_t first = dataset.snapshots.size();
    for (size_t i = 0; i < dataset.snapshots.size(); ++i) {
        if (dataset.snapshots[i].contains(token)) {
            first = i;
            break;
        }
    }
    if (first == dataset.snapshots.size())
        throw Error("token '" + token + "' appears in no snapshot");

    const EmbeddingSnapshot& anchor = dataset.snapshots[first];
    // The anchor's own k-NN list is a pure function of (anchor, token,
    // config); hoist it out of the per-month loop.
    NeighborList anchor_nn = top_k_impl(anchor, anchor.find_index(token), config);

    ChangeSeries series{token, anchor.month(), {}};
    for (size_t i = first; i < dataset.snapshots.size(); ++i) {
        const EmbeddingSnapshot& snap = dataset.snapshots[i];
        if (!snap.contains(token)) continue;  // absent months are omitted, not MISSING
        ScoreResult r = score_from_outcome(build_pair(anchor, anchor_nn, snap, token, config));
        series.points.push_back({snap.month(), r.score, r.components, r.reason});
    }
    return series;
}

namespace {

ScoredToken score_one(const TemporalDataset& dataset, const std::string& token,
                      const ScoringConfig& config) {
    ScoredToken out{token, std::nullopt, ""};
    try {
        out.series = change_series(dataset, token, config);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

std::vector<ScoredToken> score_all_serial(const TemporalDataset& dataset,
                                          const std::vector<std::string>& tokens,
                                          const ScoringConfig& config) {
    config.validate();
    std::vector<ScoredToken> out(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) out[i] = score_one(dataset, tokens[i], config);
    return out;
}

std::vector<ScoredToken> score_all_parallel(const TemporalDataset& dataset,
                                            const std::vector<std::string>& tokens,
                                            const ScoringConfig& config) {
    config.validate();
    std::vector<ScoredToken> out(tokens.size());
    const long n = static_cast<long>(tokens.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) out[i] = score_one(dataset, tokens[i], config);
    return out;
}

std::vector<ScoredToken> score_all(const TemporalDataset& dataset,
                                   const std::vector<std::string>& tokens,
                                   const ScoringConfig& config, bool parallel) {
    return parallel ? score_all_parallel(dataset, tokens, config)
                    : score_all_serial(dataset, tokens, config);
}

std::string series_to_csv(const ChangeSeries& series) {
    std::string out = "token,anchor_month,month,score,components,reason\n";
    for (const auto& p : series.points) {
        out += io::csv_field(series.token);
        out += ',' + series.anchor_month.str();
        out += ',' + p.month.str();
        out += ',';
        if (p.score) out += io::fmt_real(*p.score);
        out += ',' + std::to_string(p.components);
        out += ',';
        out += missing_reason_name(p.reason);
        out += '\n';
    }
    return out;
}

ChangeSeries series_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty series CSV");
    ChangeSeries series;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = io::split_csv_line(line);
        if (f.size() != 6) throw Error("bad series CSV row: " + line);
        if (first) {
            series.token = f[0];
            series.anchor_month = Month::parse(f[1]);
            first = false;
        } else if (series.token != f[0]) {
            throw Error("series CSV mixes tokens '" + series.token + "' and '" + f[0] + "'");
        }
        SeriesPoint p;
        p.month = Month::parse(f[2]);
        if (!f[3].empty()) {
            char* end = nullptr;
            p.score = std::strtod(f[3].c_str(), &end);
            if (end != f[3].c_str() + f[3].size()) throw Error("bad score '" + f[3] + "'");
        }
        p.components = std::atoi(f[4].c_str());
        p.reason = missing_reason_from_name(f[5]);
        if (!series.points.empty() && p.month <= series.points.back().month)
            throw Error("series CSV months not strictly increasing for '" + series.token + "'");
        series.points.push_back(std::move(p));
    }
    if (first) throw Error("series CSV has no rows");
    return series;
}

}  // namespace driftscan
