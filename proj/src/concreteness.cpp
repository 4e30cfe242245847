#include "driftscan/concreteness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"
#include "driftscan/stats.hpp"

namespace driftscan {

namespace {

std::string lowercase_ascii(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

SenseMap parse_sense_map(std::istream& in) {
    SenseMap map;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error("sense map line " + std::to_string(lineno) + " has no tab");
        std::string token = line.substr(0, tab);
        if (token.empty()) throw Error("sense map line " + std::to_string(lineno) + ": empty token");
        std::vector<std::string> lemmas;
        std::string rest = line.substr(tab + 1);
        size_t pos = 0;
        while (pos <= rest.size()) {
            size_t comma = rest.find(',', pos);
            std::string lemma = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
            if (!lemma.empty()) lemmas.push_back(lowercase_ascii(lemma));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        std::sort(lemmas.begin(), lemmas.end());
        lemmas.erase(std::unique(lemmas.begin(), lemmas.end()), lemmas.end());
        auto [it, inserted] = map.emplace(std::move(token), std::move(lemmas));
        if (!inserted) throw Error("sense map: duplicate token '" + it->first + "'");
    }
    return map;
}

SenseMap parse_sense_map(const std::string& text) {
    std::istringstream ss(text);
    return parse_sense_map(ss);
}

ConcretenessLexicon parse_lexicon(std::istream& in) {
    ConcretenessLexicon lex;
    std::string line;
    int lineno = 0;
    std::vector<double> ratings;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error("lexicon line " + std::to_string(lineno) + " has no tab");
        std::string lemma = lowercase_ascii(line.substr(0, tab));
        std::string value = line.substr(tab + 1);
        char* end = nullptr;
        double rating = std::strtod(value.c_str(), &end);
        if (end != value.c_str() + value.size() || value.empty() || !std::isfinite(rating))
            throw Error("lexicon line " + std::to_string(lineno) + ": bad rating '" + value + "'");
        if (rating < 1.0 || rating > 5.0)
            throw Error("lexicon rating for '" + lemma + "' outside [1,5]");
        auto [it, inserted] = lex.ratings.emplace(std::move(lemma), rating);
        if (!inserted) throw Error("lexicon: duplicate lemma '" + it->first + "'");
        ratings.push_back(rating);
    }
    if (ratings.empty()) throw Error("empty concreteness lexicon");
    lex.population_mean = stats::mean(ratings);
    lex.population_std = stats::stddev_pop(ratings);
    return lex;
}

ConcretenessLexicon parse_lexicon(const std::string& text) {
    std::istringstream ss(text);
    return parse_lexicon(ss);
}

std::optional<double> token_concreteness(const std::string& token, const SenseMap& senses,
                                         const ConcretenessLexicon& lexicon) {
    auto it = senses.find(token);
    if (it == senses.end()) return std::nullopt;
    double sum = 0.0;
    int matched = 0;
    for (const auto& lemma : it->second) {
        auto rit = lexicon.ratings.find(lemma);
        if (rit == lexicon.ratings.end()) continue;
        sum += rit->second;
        ++matched;
    }
    if (matched == 0) return std::nullopt;
    return sum / matched;
}

TTestResult one_sample_ttest(std::span<const double> sample, double mu) {
    if (sample.size() < 2) throw Error("t-test needs n >= 2");
    TTestResult r;
    r.n = static_cast<int>(sample.size());
    r.mu = mu;
    r.sample_mean = stats::mean(sample);
    r.sample_std = stats::stddev_sample(sample);
    if (r.sample_std == 0.0) {
        if (r.sample_mean == mu) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
            return r;
        }
        throw Error("t-test undefined: zero sample variance with mean != mu");
    }
    r.t_statistic = (r.sample_mean - mu) / (r.sample_std / std::sqrt(static_cast<double>(r.n)));
    r.p_value = stats::student_t_two_sided_p(r.t_statistic, static_cast<double>(r.n - 1));
    return r;
}

ConcretenessReport concreteness_report(const VolatilityTable& table, const SenseMap& senses,
                                       const ConcretenessLexicon& lexicon, double fraction) {
    ConcretenessReport report;
    report.fraction = fraction;
    auto selected = top_fraction(table, fraction);
    std::vector<double> scores;
    for (const auto& token : selected) {
        auto c = token_concreteness(token, senses, lexicon);
        if (c) {
            report.matched.emplace_back(token, *c);
            scores.push_back(*c);
        } else {
            report.unmatched.push_back(token);
        }
    }
    if (scores.size() < 2) {
        std::string msg = "concreteness report: only " + std::to_string(scores.size()) +
                          " of " + std::to_string(selected.size()) +
                          " high-change tokens matched the lexicon; unmatched:";
        for (const auto& t : report.unmatched) msg += " " + t;
        throw Error(msg);
    }
    report.test = one_sample_ttest(scores, lexicon.population_mean);
    return report;
}

std::string report_to_json(const ConcretenessReport& report) {
    nlohmann::json j;
    j["t"] = report.test.t_statistic;
    j["p"] = report.test.p_value;
    j["n"] = report.test.n;
    j["sample_mean"] = report.test.sample_mean;
    j["sample_std"] = report.test.sample_std;
    j["mu"] = report.test.mu;
    j["fraction"] = report.fraction;
    j["matched"] = nlohmann::json::array();
    for (const auto& [token, score] : report.matched)
        j["matched"].push_back({{"token", token}, {"concreteness", score}});
    j["unmatched"] = report.unmatched;
    return j.dump(2) + "\n";
}

}  // namespace driftscan
