#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftscan/cohorts.hpp"

namespace driftscan {

// token -> sense lemmas (lowercased, deduplicated; empty lists allowed).
using SenseMap = std::map<std::string, std::vector<std::string>>;

// TSV: token<TAB>lemma1,lemma2,...
SenseMap parse_sense_map(std::istream& in);
SenseMap parse_sense_map(const std::string& text);

struct ConcretenessLexicon {
    std::map<std::string, double> ratings;  // lemma -> rating on the 1..5 scale
    double population_mean = 0.0;
    double population_std = 0.0;  // ddof=0, descriptive
};

// TSV: lemma<TAB>rating. Ratings must lie in [1,5]; duplicate lemmas are an
// error.
ConcretenessLexicon parse_lexicon(std::istream& in);
ConcretenessLexicon parse_lexicon(const std::string& text);

// Mean rating over the token's sense lemmas found in the lexicon; nullopt when
// no lemma matches.
std::optional<double> token_concreteness(const std::string& token, const SenseMap& senses,
                                         const ConcretenessLexicon& lexicon);

struct TTestResult {
    double sample_mean = 0.0;
    double sample_std = 0.0;  // ddof=1
    int n = 0;
    double t_statistic = 0.0;
    double p_value = 1.0;  // two-sided
    double mu = 0.0;
};

// t = (mean - mu) / (s / sqrt(n)). Degenerate zero-variance samples report
// t=0, p=1 when the mean equals mu and are an error otherwise.
TTestResult one_sample_ttest(std::span<const double> sample, double mu);

struct ConcretenessReport {
    TTestResult test;
    double fraction = 0.10;
    std::vector<std::pair<std::string, double>> matched;  // selection order (volatility desc)
    std::vector<std::string> unmatched;
};

// Top-fraction tokens by volatility, scored through the sense map and
// lexicon, tested against the lexicon population mean.
ConcretenessReport concreteness_report(const VolatilityTable& table, const SenseMap& senses,
                                       const ConcretenessLexicon& lexicon, double fraction = 0.10);

std::string report_to_json(const ConcretenessReport& report);

}  // namespace driftscan
