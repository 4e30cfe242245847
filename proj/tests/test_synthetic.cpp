#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "driftscan/cohorts.hpp"
#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"
#include "driftscan/scoring.hpp"
#include "driftscan/synthetic.hpp"

#include "oracles.hpp"

using namespace driftscan;

namespace {

Month m(const char* s) { return Month::parse(s); }

SyntheticConfig small_config(uint64_t seed = 7) {
    SyntheticConfig cfg;
    cfg.start = m("2012-01");
    cfg.months = 18;
    cfg.vocab_size = 160;
    cfg.dim = 16;
    cfg.seed = seed;
    return cfg;
}

DriftSpec spec_of(std::string token, DriftPattern pattern, const char* onset,
                  double magnitude = 1.0, int period = 4) {
    DriftSpec s;
    s.token = std::move(token);
    s.pattern = pattern;
    s.onset = m(onset);
    s.magnitude = magnitude;
    s.period = period;
    return s;
}

ScoringConfig open_scoring(int k = 8, int pool = 60) {
    ScoringConfig cfg;
    cfg.k = k;
    cfg.pool = pool;
    cfg.filter.exclude_hashtags = false;
    cfg.filter.exclude_targets = false;
    return cfg;
}

}  // namespace

TEST_CASE("drift weight follows the pattern definitions") {
    Month last = m("2016-12");
    auto stable = spec_of("s", DriftPattern::Stable, "2013-01");
    auto peak = spec_of("p", DriftPattern::SuddenPeak, "2013-01", 0.8);
    auto gradual = spec_of("g", DriftPattern::Gradual, "2013-01", 1.0);
    auto seasonal = spec_of("z", DriftPattern::Seasonal, "2013-01", 0.6, 3);

    CHECK(drift_weight(stable, m("2014-01"), last) == 0.0);

    CHECK(drift_weight(peak, m("2012-12"), last) == 0.0);
    CHECK(drift_weight(peak, m("2013-01"), last) == 0.8);
    CHECK(drift_weight(peak, m("2013-03"), last) == 0.8);
    CHECK(drift_weight(peak, m("2013-04"), last) == 0.0);

    CHECK(drift_weight(gradual, m("2013-01"), last) == 0.0);
    CHECK(drift_weight(gradual, last, last) == 1.0);
    CHECK(drift_weight(gradual, m("2013-02"), last) > 0.0);
    CHECK(drift_weight(gradual, m("2014-01"), last) <
          drift_weight(gradual, m("2015-01"), last));

    CHECK(drift_weight(seasonal, m("2013-01"), last) == 0.6);  // on-block months 0..2
    CHECK(drift_weight(seasonal, m("2013-03"), last) == 0.6);
    CHECK(drift_weight(seasonal, m("2013-04"), last) == 0.0);  // off-block months 3..5
    CHECK(drift_weight(seasonal, m("2013-06"), last) == 0.0);
    CHECK(drift_weight(seasonal, m("2013-07"), last) == 0.6);  // back on
    CHECK(drift_weight(seasonal, m("2012-06"), last) == 0.0);  // before onset
}

TEST_CASE("generation is a pure function of its inputs") {
    auto specs = std::vector<DriftSpec>{spec_of("alpha", DriftPattern::SuddenPeak, "2012-06"),
                                        spec_of("beta", DriftPattern::Stable, "2012-01")};
    auto d1 = generate(specs, small_config(41));
    auto d2 = generate(specs, small_config(41));
    REQUIRE(d1.data.snapshots.size() == d2.data.snapshots.size());
    for (size_t i = 0; i < d1.data.snapshots.size(); ++i)
        CHECK(serialize_snapshot(d1.data.snapshots[i]) == serialize_snapshot(d2.data.snapshots[i]));

    auto d3 = generate(specs, small_config(42));
    CHECK(serialize_snapshot(d1.data.snapshots[0]) != serialize_snapshot(d3.data.snapshots[0]));
}

TEST_CASE("generated datasets round-trip through the snapshot parser") {
    auto specs = std::vector<DriftSpec>{spec_of("alpha", DriftPattern::Gradual, "2012-03")};
    auto data = generate(specs, small_config());
    for (const auto& snap : data.data.snapshots) {
        std::string text = serialize_snapshot(snap);
        auto reparsed = parse_snapshot(text, snap.month());
        CHECK(serialize_snapshot(reparsed) == text);
    }
}

TEST_CASE("stable tokens score exactly zero every month") {
    auto specs = std::vector<DriftSpec>{spec_of("quiet", DriftPattern::Stable, "2012-01")};
    auto data = generate(specs, small_config());
    auto series = change_series(data.data, "quiet", open_scoring());
    REQUIRE(series.points.size() == 18);
    for (const auto& p : series.points) {
        REQUIRE(p.score.has_value());
        CHECK(*p.score == 0.0);
    }
}

TEST_CASE("sudden peak spikes inside its window and subsides after") {
    auto specs = std::vector<DriftSpec>{spec_of("spiky", DriftPattern::SuddenPeak, "2012-07", 1.0)};
    auto data = generate(specs, small_config());
    auto series = change_series(data.data, "spiky", open_scoring());

    double peak_value = 0.0;
    Month peak_month;
    for (const auto& p : series.points) {
        REQUIRE(p.score.has_value());
        if (*p.score > peak_value) {
            peak_value = *p.score;
            peak_month = p.month;
        }
    }
    CHECK(peak_value > 0.3);
    CHECK(peak_month >= m("2012-07"));
    CHECK(peak_month <= m("2012-09"));
    for (const auto& p : series.points)
        if (p.month > m("2012-09")) CHECK(*p.score < 0.1 * peak_value);
}

TEST_CASE("planted gradual drift matches the brute-force scorer and trends upward") {
    auto specs = std::vector<DriftSpec>{spec_of("creep", DriftPattern::Gradual, "2012-04", 1.0)};
    auto cfg = small_config(11);
    auto data = generate(specs, cfg);
    ScoringConfig scoring = open_scoring();
    auto series = change_series(data.data, "creep", scoring);

    // Oracle recomputation from the raw serialized tables.
    auto raw_of = [&](const EmbeddingSnapshot& s) {
        oracle::RawTable t;
        for (int i = 0; i < s.size(); ++i) {
            auto v = s.vector_at(i);
            t.emplace_back(s.token_at(i), std::vector<double>(v.begin(), v.end()));
        }
        return t;
    };
    auto anchor_raw = raw_of(data.data.snapshots.front());
    for (size_t i = 0; i < series.points.size(); ++i) {
        double want = oracle::change_score(anchor_raw, raw_of(data.data.snapshots[i]), "creep",
                                           scoring.k, scoring.pool, scoring.min_components,
                                           scoring.filter);
        REQUIRE(series.points[i].score.has_value());
        CHECK(*series.points[i].score == want);
    }

    // Non-decreasing trend after onset, modulo tiny numeric wiggles.
    double prev = -1.0;
    for (const auto& p : series.points) {
        if (p.month < m("2012-04")) continue;
        CHECK(*p.score >= prev - 1e-6);
        prev = *p.score;
    }
    CHECK(*series.points.back().score > 0.3);
}

TEST_CASE("at full drift the nearest neighbors are the B prototype subset") {
    auto specs = std::vector<DriftSpec>{spec_of("mover", DriftPattern::SuddenPeak, "2012-07", 1.0)};
    auto cfg = small_config(23);
    auto data = generate(specs, cfg);
    const auto& members = data.prototype_b.at("mover");

    const EmbeddingSnapshot* at_peak = data.data.find(m("2012-08"));
    REQUIRE(at_peak != nullptr);
    auto nn = top_k_neighbors(*at_peak, "mover", open_scoring(cfg.prototype_size, 60));
    REQUIRE(nn.neighbors.size() == static_cast<size_t>(cfg.prototype_size));
    std::set<std::string> expect(members.begin(), members.end());
    for (const auto& nb : nn.neighbors) CHECK(expect.contains(nb.token));
}

TEST_CASE("planted drifting tokens outrank distractors in volatility") {
    std::vector<DriftSpec> specs{spec_of("mover_a", DriftPattern::SuddenPeak, "2012-05", 1.0),
                                 spec_of("mover_b", DriftPattern::Gradual, "2012-04", 1.0)};
    auto data = generate(specs, small_config(31));

    ScoringConfig scoring = open_scoring();
    std::vector<std::string> everyone = data.data.snapshots.front().tokens();
    auto results = score_all_serial(data.data, everyone, scoring);

    double min_planted = 1e9;
    double max_distractor = -1e9;
    int distractors_at_zero = 0, distractor_count = 0;
    for (const auto& r : results) {
        REQUIRE(r.series.has_value());
        double vol = volatility(*r.series);
        if (data.labels.contains(r.token)) {
            min_planted = std::min(min_planted, vol);
        } else {
            max_distractor = std::max(max_distractor, vol);
            ++distractor_count;
            if (vol == 0.0) ++distractors_at_zero;
        }
    }
    CHECK(min_planted > max_distractor);
    // Distractors whose neighborhoods never contain a planted token sit at
    // exactly zero; that should be the vast majority.
    CHECK(distractors_at_zero > distractor_count / 2);
}

TEST_CASE("generator input validation") {
    auto cfg = small_config();
    CHECK_THROWS_AS(generate({}, cfg), Error);

    auto bad_onset = std::vector<DriftSpec>{spec_of("x", DriftPattern::Stable, "2020-01")};
    CHECK_THROWS_AS(generate(bad_onset, cfg), Error);

    auto ok = std::vector<DriftSpec>{spec_of("x", DriftPattern::Stable, "2012-01")};
    SyntheticConfig tiny = cfg;
    tiny.vocab_size = 10;  // cannot hold two exclusive subsets of 8
    CHECK_THROWS_WITH_AS(generate(ok, tiny), doctest::Contains("too small"), Error);

    auto bad_mag = std::vector<DriftSpec>{spec_of("x", DriftPattern::Stable, "2012-01", 1.5)};
    CHECK_THROWS_AS(generate(bad_mag, cfg), Error);
}

TEST_CASE("evaluate_recovery counts pairwise agreement") {
    std::map<std::string, DriftSpec> labels;
    for (int i = 0; i < 10; ++i) {
        labels["a" + std::to_string(i)] = spec_of("a" + std::to_string(i),
                                                  DriftPattern::Stable, "2012-01");
        labels["b" + std::to_string(i)] = spec_of("b" + std::to_string(i),
                                                  DriftPattern::Gradual, "2012-01");
    }
    ClusterReport report;
    for (const auto& [token, spec] : labels) report.tokens.push_back(token);
    std::sort(report.tokens.begin(), report.tokens.end());

    SUBCASE("clustering identical to the labels scores 1") {
        report.n_clusters = 2;
        for (const auto& t : report.tokens) report.assignments.push_back(t[0] == 'a' ? 0 : 1);
        CHECK(evaluate_recovery(labels, report) == 1.0);
    }
    SUBCASE("everything in one cluster scores 90/190") {
        report.n_clusters = 1;
        report.assignments.assign(report.tokens.size(), 0);
        CHECK(evaluate_recovery(labels, report) == doctest::Approx(90.0 / 190.0).epsilon(1e-12));
    }
    SUBCASE("random assignments hover at the label-distribution baseline") {
        const int n_clusters = 4;
        double p_same = 90.0 / 190.0;
        double expected = p_same * (1.0 / n_clusters) + (1.0 - p_same) * (1.0 - 1.0 / n_clusters);
        oracle::TestRng rng(99);
        double total = 0.0;
        const int rounds = 400;
        for (int trial = 0; trial < rounds; ++trial) {
            report.assignments.clear();
            for (size_t i = 0; i < report.tokens.size(); ++i)
                report.assignments.push_back(rng.below(n_clusters));
            report.n_clusters = n_clusters;
            total += evaluate_recovery(labels, report);
        }
        CHECK(total / rounds == doctest::Approx(expected).epsilon(0.05));
    }
    SUBCASE("a labeled token missing from the report throws") {
        report.n_clusters = 1;
        report.assignments.assign(report.tokens.size(), 0);
        labels["zmissing"] = spec_of("zmissing", DriftPattern::Stable, "2012-01");
        CHECK_THROWS_AS(evaluate_recovery(labels, report), Error);
    }
}

TEST_CASE("write_synthetic emits a loadable dataset with labels and manifest") {
    oracle::TempDir tmp("synth_write");
    auto specs = std::vector<DriftSpec>{spec_of("alpha", DriftPattern::Seasonal, "2012-03", 0.9, 3)};
    auto cfg = small_config(13);
    auto data = generate(specs, cfg);
    write_synthetic(data, tmp.path);

    auto loaded = load_dataset(tmp.path);  // ignores labels.json and manifest.json
    CHECK(loaded.snapshots.size() == static_cast<size_t>(cfg.months));
    CHECK(loaded.dim == cfg.dim);

    std::string labels = io::read_file(tmp.path / "labels.json");
    CHECK(labels.find("seasonal") != std::string::npos);
    CHECK(labels.find("prototype_b") != std::string::npos);
    std::string manifest = io::read_file(tmp.path / "manifest.json");
    CHECK(manifest.find(kGeneratorId) != std::string::npos);

    // Same seed, same specs: byte-identical files.
    oracle::TempDir tmp2("synth_write_again");
    write_synthetic(generate(specs, cfg), tmp2.path);
    CHECK(io::read_file(tmp2.path / "2012-01.vec") == io::read_file(tmp.path / "2012-01.vec"));
    CHECK(io::read_file(tmp2.path / "labels.json") == labels);
}

TEST_CASE("synth spec JSON parsing") {
    std::string good = R"({
        "start_month": "2012-01", "months": 12, "vocab_size": 200, "dim": 16, "seed": 5,
        "tokens": [
            {"name": "alpha", "pattern": "sudden_peak", "onset": "2012-04", "magnitude": 1.0},
            {"name": "beta", "pattern": "seasonal", "period": 3}
        ]
    })";
    auto [specs, cfg] = parse_synth_spec(good);
    REQUIRE(specs.size() == 2);
    CHECK(cfg.months == 12);
    CHECK(cfg.seed == 5);
    CHECK(specs[0].pattern == DriftPattern::SuddenPeak);
    CHECK(specs[1].onset == cfg.start);  // defaults to the dataset start
    CHECK(specs[1].period == 3);

    CHECK_THROWS_AS(parse_synth_spec("{\"tokens\": []}"), Error);
    CHECK_THROWS_AS(parse_synth_spec("not json"), Error);
    CHECK_THROWS_AS(parse_synth_spec("{\"tokens\": [{\"name\": \"x\"}]}"), Error);
}
