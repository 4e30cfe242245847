#include "driftscan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"

namespace driftscan {

double SplitMix64::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    double u2 = next_unit();
    constexpr double two_pi = 6.283185307179586476925286766559;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = two_pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

DriftPattern drift_pattern_from_name(const std::string& name) {
    if (name == "stable") return DriftPattern::Stable;
    if (name == "sudden_peak") return DriftPattern::SuddenPeak;
    if (name == "gradual") return DriftPattern::Gradual;
    if (name == "seasonal") return DriftPattern::Seasonal;
    throw Error("unknown drift pattern '" + name + "'");
}

const char* drift_pattern_name(DriftPattern p) {
    switch (p) {
        case DriftPattern::Stable: return "stable";
        case DriftPattern::SuddenPeak: return "sudden_peak";
        case DriftPattern::Gradual: return "gradual";
        case DriftPattern::Seasonal: return "seasonal";
    }
    return "stable";
}

double drift_weight(const DriftSpec& spec, Month at, Month last) {
    int since = months_between(spec.onset, at);
    switch (spec.pattern) {
        case DriftPattern::Stable:
            return 0.0;
        case DriftPattern::SuddenPeak:
            return since >= 0 && since < 3 ? spec.magnitude : 0.0;
        case DriftPattern::Gradual: {
            if (since < 0) return 0.0;
            int span = months_between(spec.onset, last);
            if (span <= 0) return spec.magnitude;
            return spec.magnitude * static_cast<double>(since) / static_cast<double>(span);
        }
        case DriftPattern::Seasonal: {
            if (since < 0) return 0.0;
            return (since / spec.period) % 2 == 0 ? spec.magnitude : 0.0;
        }
    }
    return 0.0;
}

namespace {

std::vector<double> unit_vector(SplitMix64& rng, int dim) {
    std::vector<double> v(dim);
    double sq = 0.0;
    do {
        sq = 0.0;
        for (int i = 0; i < dim; ++i) {
            v[i] = rng.next_gaussian();
            sq += v[i] * v[i];
        }
    } while (sq < 1e-12);
    double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
}

std::vector<double> normalized(std::vector<double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq == 0.0) throw Error("cannot normalize zero vector");
    double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
}

std::string distractor_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%05d", i);
    return buf;
}

}  // namespace

SyntheticDataset generate(const std::vector<DriftSpec>& specs, const SyntheticConfig& config) {
    if (specs.empty()) throw Error("synthetic generate: no drift specs");
    if (config.months < 1) throw Error("synthetic generate: months must be >= 1");
    if (config.dim < 8) throw Error("synthetic generate: dim must be >= 8");
    if (config.prototype_size < 1) throw Error("synthetic generate: prototype_size must be >= 1");
    const Month last = config.start.plus(config.months - 1);
    for (const auto& spec : specs) {
        if (spec.token.empty()) throw Error("synthetic generate: empty token name");
        if (spec.onset < config.start || spec.onset > last)
            throw Error("onset " + spec.onset.str() + " for '" + spec.token +
                        "' outside dataset range");
        if (spec.magnitude < 0.0 || spec.magnitude > 1.0)
            throw Error("magnitude for '" + spec.token + "' outside [0,1]");
        if (spec.pattern == DriftPattern::Seasonal && spec.period < 1)
            throw Error("seasonal period for '" + spec.token + "' must be >= 1");
    }

    const int n_planted = static_cast<int>(specs.size());
    const int n_distractors = config.vocab_size - n_planted;
    const int per_token = 2 * config.prototype_size;
    if (n_distractors < per_token * n_planted)
        throw Error("vocabulary too small to allocate disjoint prototype subsets: need " +
                    std::to_string(per_token * n_planted) + " distractors, have " +
                    std::to_string(std::max(n_distractors, 0)));

    SplitMix64 rng(config.seed);

    // Fixed random unit vectors for every distractor.
    std::vector<std::vector<double>> dvecs(n_distractors);
    for (int i = 0; i < n_distractors; ++i) dvecs[i] = unit_vector(rng, config.dim);

    // Deterministic permutation for subset allocation (Fisher-Yates).
    std::vector<int> perm(n_distractors);
    for (int i = 0; i < n_distractors; ++i) perm[i] = i;
    for (int i = n_distractors - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next() % static_cast<uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }

    SyntheticDataset out;
    out.config = config;

    // Per planted token: two exclusive distractor subsets pulled toward a
    // random center each, so the subsets are genuine nearest neighborhoods.
    struct Prototypes {
        std::vector<double> a, b;
    };
    std::vector<Prototypes> prototypes(n_planted);
    int cursor = 0;
    for (int t = 0; t < n_planted; ++t) {
        for (int side = 0; side < 2; ++side) {
            auto center = unit_vector(rng, config.dim);
            std::vector<double> mean(config.dim, 0.0);
            std::vector<std::string> names;
            for (int s = 0; s < config.prototype_size; ++s) {
                int d = perm[cursor++];
                // Perturb by a fixed-norm random direction so the cluster
                // tightness does not depend on the dimension.
                auto dir = unit_vector(rng, config.dim);
                std::vector<double> v(config.dim);
                for (int c = 0; c < config.dim; ++c)
                    v[c] = center[c] + config.prototype_spread * dir[c];
                dvecs[d] = normalized(std::move(v));
                for (int c = 0; c < config.dim; ++c) mean[c] += dvecs[d][c];
                names.push_back(distractor_name(d));
            }
            for (double& x : mean) x /= config.prototype_size;
            std::sort(names.begin(), names.end());
            if (side == 0) {
                prototypes[t].a = normalized(std::move(mean));
                out.prototype_a[specs[t].token] = std::move(names);
            } else {
                prototypes[t].b = normalized(std::move(mean));
                out.prototype_b[specs[t].token] = std::move(names);
            }
        }
        out.labels[specs[t].token] = specs[t];
    }

    std::vector<EmbeddingSnapshot> snaps;
    snaps.reserve(config.months);
    for (int m = 0; m < config.months; ++m) {
        Month month = config.start.plus(m);
        std::vector<std::pair<std::string, std::vector<double>>> entries;
        entries.reserve(config.vocab_size);
        for (int d = 0; d < n_distractors; ++d) entries.emplace_back(distractor_name(d), dvecs[d]);
        for (int t = 0; t < n_planted; ++t) {
            double w = drift_weight(specs[t], month, last);
            std::vector<double> v(config.dim);
            for (int c = 0; c < config.dim; ++c)
                v[c] = (1.0 - w) * prototypes[t].a[c] + w * prototypes[t].b[c];
            entries.emplace_back(specs[t].token, normalized(std::move(v)));
        }
        snaps.emplace_back(month, config.dim, std::move(entries));
    }
    out.data = make_dataset(std::move(snaps));
    return out;
}

double evaluate_recovery(const std::map<std::string, DriftSpec>& labels,
                         const ClusterReport& report) {
    std::vector<std::pair<int, int>> pairs;  // (cluster, pattern) per labeled token
    for (const auto& [token, spec] : labels) {
        int cid = report.cluster_of(token);
        if (cid < 0) throw Error("labeled token '" + token + "' missing from cluster report");
        pairs.emplace_back(cid, static_cast<int>(spec.pattern));
    }
    const size_t n = pairs.size();
    if (n < 2) throw Error("recovery evaluation needs >= 2 labeled tokens");
    long correct = 0, total = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            bool co_clustered = pairs[i].first == pairs[j].first;
            bool same_pattern = pairs[i].second == pairs[j].second;
            if (co_clustered == same_pattern) ++correct;
            ++total;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

void write_synthetic(const SyntheticDataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& snap : dataset.data.snapshots)
        io::write_file(dir / (snap.month().str() + ".vec"), serialize_snapshot(snap));

    nlohmann::json labels;
    for (const auto& [token, spec] : dataset.labels) {
        nlohmann::json j;
        j["pattern"] = drift_pattern_name(spec.pattern);
        j["onset"] = spec.onset.str();
        j["magnitude"] = spec.magnitude;
        if (spec.pattern == DriftPattern::Seasonal) j["period"] = spec.period;
        j["prototype_a"] = dataset.prototype_a.at(token);
        j["prototype_b"] = dataset.prototype_b.at(token);
        labels[token] = std::move(j);
    }
    io::write_file(dir / "labels.json", labels.dump(2) + "\n");

    nlohmann::json manifest;
    manifest["generator"] = kGeneratorId;
    manifest["seed"] = dataset.config.seed;
    manifest["start_month"] = dataset.config.start.str();
    manifest["months"] = dataset.config.months;
    manifest["vocab_size"] = dataset.config.vocab_size;
    manifest["dim"] = dataset.config.dim;
    manifest["prototype_size"] = dataset.config.prototype_size;
    manifest["prototype_spread"] = dataset.config.prototype_spread;
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::pair<std::vector<DriftSpec>, SyntheticConfig> parse_synth_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("synth spec: invalid JSON: ") + e.what());
    }
    SyntheticConfig config;
    try {
        if (j.contains("start_month")) config.start = Month::parse(j["start_month"]);
        if (j.contains("months")) config.months = j["months"];
        if (j.contains("vocab_size")) config.vocab_size = j["vocab_size"];
        if (j.contains("dim")) config.dim = j["dim"];
        if (j.contains("seed")) config.seed = j["seed"];
        if (j.contains("prototype_size")) config.prototype_size = j["prototype_size"];
        if (j.contains("prototype_spread")) config.prototype_spread = j["prototype_spread"];

        std::vector<DriftSpec> specs;
        if (!j.contains("tokens") || !j["tokens"].is_array() || j["tokens"].empty())
            throw Error("synth spec: 'tokens' must be a non-empty array");
        for (const auto& t : j["tokens"]) {
            DriftSpec spec;
            spec.token = t.at("name");
            spec.pattern = drift_pattern_from_name(t.at("pattern"));
            spec.onset = t.contains("onset") ? Month::parse(t["onset"]) : config.start;
            if (t.contains("magnitude")) spec.magnitude = t["magnitude"];
            if (t.contains("period")) spec.period = t["period"];
            specs.push_back(std::move(spec));
        }
        return {std::move(specs), config};
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("synth spec: ") + e.what());
    }
}

}  // namespace driftscan
