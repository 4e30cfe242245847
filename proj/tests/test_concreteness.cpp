#include <doctest.h>

#include <cmath>

#include "driftscan/concreteness.hpp"
#include "driftscan/error.hpp"
#include "driftscan/stats.hpp"

#include "oracles.hpp"

using namespace driftscan;

namespace {

// Table-4 concreteness ratings of the high-change tokens, highest first.
const std::vector<double> kTable4 = {5, 5, 5, 5, 5, 4.86, 4.83, 4.8, 4.77, 4.73,
                                     4.57, 4.48, 4.48, 4.26, 3.61, 3.52};
// Hand arithmetic: mean 4.619375, ddof-1 std 0.4684793663, t vs 3.04 below.
constexpr double kExpectedT = 13.4851189918;

}  // namespace

TEST_CASE("sense map and lexicon parsing") {
    auto senses = parse_sense_map("tok1\tCactus,Plant\ntok2\t\ntok3\tone,one,two\n");
    CHECK(senses.at("tok1") == std::vector<std::string>{"cactus", "plant"});
    CHECK(senses.at("tok2").empty());
    CHECK(senses.at("tok3") == std::vector<std::string>{"one", "two"});  // deduplicated
    CHECK_THROWS_AS(parse_sense_map("no_tab_here\n"), Error);
    CHECK_THROWS_AS(parse_sense_map("a\tx\na\ty\n"), Error);  // duplicate token

    auto lex = parse_lexicon("cactus\t5.0\nplant\t3.0\n");
    CHECK(lex.ratings.at("cactus") == 5.0);
    CHECK(lex.population_mean == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(parse_lexicon("bad\t9.5\n"), Error);   // outside [1,5]
    CHECK_THROWS_AS(parse_lexicon("a\t3\na\t4\n"), Error);  // duplicate lemma
    CHECK_THROWS_AS(parse_lexicon("a\tx\n"), Error);        // non-numeric
    CHECK_THROWS_AS(parse_lexicon(""), Error);              // empty lexicon
}

TEST_CASE("token_concreteness") {
    auto senses = parse_sense_map("cactus_tok\tcactus\ntwo_tok\thigh,low\nnone_tok\tmissing\n");
    auto lex = parse_lexicon("cactus\t5.0\nhigh\t5.0\nlow\t4.0\n");

    CHECK(*token_concreteness("cactus_tok", senses, lex) == 5.0);
    CHECK(*token_concreteness("two_tok", senses, lex) == 4.5);
    CHECK(!token_concreteness("none_tok", senses, lex).has_value());
    CHECK(!token_concreteness("unknown_tok", senses, lex).has_value());
}

TEST_CASE("one_sample_ttest analytic cases") {
    SUBCASE("sample all equal to mu reports t=0, p=1") {
        std::vector<double> s{3.0, 3.0, 3.0};
        auto r = one_sample_ttest(s, 3.0);
        CHECK(r.t_statistic == 0.0);
        CHECK(r.p_value == 1.0);
    }
    SUBCASE("{0,2} vs mu=0 gives t=1") {
        std::vector<double> s{0.0, 2.0};
        auto r = one_sample_ttest(s, 0.0);
        CHECK(r.sample_mean == 1.0);
        CHECK(r.sample_std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(r.t_statistic == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero variance away from mu is undefined") {
        std::vector<double> s{2.0, 2.0};
        CHECK_THROWS_AS(one_sample_ttest(s, 3.0), Error);
    }
    SUBCASE("n < 2 is an error") {
        std::vector<double> s{1.0};
        CHECK_THROWS_AS(one_sample_ttest(s, 0.0), Error);
    }
}

TEST_CASE("Table-4 ratings vs the lexicon mean reproduce the reported t") {
    auto r = one_sample_ttest(kTable4, 3.04);
    CHECK(r.n == 16);
    CHECK(r.sample_mean == doctest::Approx(4.619375).epsilon(1e-12));
    CHECK(r.sample_std == doctest::Approx(0.4684793663).epsilon(1e-9));
    CHECK(r.t_statistic == doctest::Approx(kExpectedT).epsilon(1e-9));
    CHECK(r.t_statistic > 13.0);
    CHECK(r.t_statistic < 14.0);
    CHECK(r.p_value < 1e-8);
    CHECK(r.p_value > 0.0);
}

TEST_CASE("t distribution CDF against closed forms") {
    // dof=1 is Cauchy: F(1) = 3/4, F(0) = 1/2.
    CHECK(stats::student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(stats::student_t_cdf(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    // dof=2 has the closed form F(t) = 1/2 + t / (2*sqrt(t^2+2)).
    for (double t : {-3.0, -0.7, 0.0, 0.4, 1.9, 12.0}) {
        double expect = 0.5 + t / (2.0 * std::sqrt(t * t + 2.0));
        CHECK(stats::student_t_cdf(t, 2.0) == doctest::Approx(expect).epsilon(1e-10));
    }
    // Two-sided p agrees with the tail integral.
    for (double t : {0.5, 1.0, 2.5, 7.0}) {
        double expect = 2.0 * (1.0 - stats::student_t_cdf(t, 9.0));
        CHECK(stats::student_t_two_sided_p(t, 9.0) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("t-test invariances") {
    oracle::TestRng rng(8);
    std::vector<double> sample(12);
    for (auto& v : sample) v = rng.uniform(1, 5);

    SUBCASE("shifting sample and mu together leaves t unchanged") {
        auto base = one_sample_ttest(sample, 2.0);
        std::vector<double> shifted = sample;
        for (auto& v : shifted) v += 10.0;
        auto moved = one_sample_ttest(shifted, 12.0);
        CHECK(moved.t_statistic == doctest::Approx(base.t_statistic).epsilon(1e-9));
    }
    SUBCASE("reflecting about the sample mean flips the sign of t") {
        auto base = one_sample_ttest(sample, 2.0);
        double m = stats::mean(sample);
        std::vector<double> reflected;
        for (double v : sample) reflected.push_back(2.0 * m - v);
        auto flipped = one_sample_ttest(reflected, 2.0 * m - 2.0);
        CHECK(flipped.t_statistic == doctest::Approx(-base.t_statistic).epsilon(1e-9));
    }
    SUBCASE("p decreases strictly as |t| grows") {
        double prev = 1.1;
        for (double t : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
            double p = stats::student_t_two_sided_p(t, 7.0);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("concreteness_report selects, matches, and tests") {
    // 20 tokens; the top-10% by volatility are exactly {hi1, hi2}.
    VolatilityTable table;
    for (int i = 0; i < 18; ++i)
        table.entries.push_back({"low" + std::to_string(i), 0.01 * i, 10});
    table.entries.push_back({"hi1", 0.9, 10});
    table.entries.push_back({"hi2", 0.8, 10});

    SUBCASE("matched tokens feed the test, unmatched are listed") {
        auto senses = parse_sense_map("hi1\tcactus\nhi2\tgoat\nlow0\tpaper\n");
        auto lex = parse_lexicon("cactus\t5.0\ngoat\t4.8\npaper\t3.0\nfiller1\t1.2\nfiller2\t2.0\n");
        auto report = concreteness_report(table, senses, lex, 0.10);
        CHECK(report.test.n == 2);
        CHECK(report.matched.size() == 2);
        CHECK(report.matched[0].first == "hi1");  // volatility order
        CHECK(report.matched[0].second == 5.0);
        CHECK(report.unmatched.empty());
        CHECK(report.test.mu == lex.population_mean);
    }
    SUBCASE("nothing matched is an error naming the unmatched tokens") {
        auto senses = parse_sense_map("other\tcactus\n");
        auto lex = parse_lexicon("cactus\t5.0\n");
        CHECK_THROWS_WITH_AS(concreteness_report(table, senses, lex, 0.10),
                             doctest::Contains("hi1"), Error);
    }
    SUBCASE("null construction: ratings hugging mu keep p large") {
        VolatilityTable big;
        for (int i = 0; i < 40; ++i)
            big.entries.push_back({"tok" + std::to_string(i), 0.01 * i, 10});
        std::string senses_tsv, lex_tsv = "anchor_low\t1.0\nanchor_high\t5.0\n";
        // Ratings symmetric around the population mean of 3.0.
        for (int i = 0; i < 4; ++i) {
            std::string tok = "tok" + std::to_string(39 - i);
            std::string lemma = "lemma" + std::to_string(i);
            senses_tsv += tok + "\t" + lemma + "\n";
            double rating = 3.0 + (i % 2 == 0 ? 0.01 : -0.01);
            lex_tsv += lemma + "\t" + std::to_string(rating) + "\n";
        }
        auto senses = parse_sense_map(senses_tsv);
        auto lex = parse_lexicon(lex_tsv);
        auto report = concreteness_report(big, senses, lex, 0.10);
        CHECK(report.test.n == 4);
        CHECK(std::fabs(report.test.t_statistic) < 0.5);
        CHECK(report.test.p_value > 0.05);
    }
}

TEST_CASE("report JSON carries the full result") {
    VolatilityTable table;
    table.entries.push_back({"a", 0.9, 10});
    table.entries.push_back({"b", 0.8, 10});
    auto lex = parse_lexicon("cactus\t5.0\ngoat\t4.0\nother\t3.0\n");
    auto senses = parse_sense_map("a\tcactus\nb\tgoat\n");
    auto report = concreteness_report(table, senses, lex, 1.0);
    std::string json = report_to_json(report);
    CHECK(json.find("\"t\"") != std::string::npos);
    CHECK(json.find("\"matched\"") != std::string::npos);
    CHECK(json.find("cactus") == std::string::npos);  // lemmas stay internal
    CHECK(json.find("\"a\"") != std::string::npos);
}
