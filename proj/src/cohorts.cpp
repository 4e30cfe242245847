#include "driftscan/cohorts.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"
#include "driftscan/stats.hpp"

namespace driftscan {

double volatility(const ChangeSeries& series) {
    std::vector<double> scores;
    for (const auto& p : series.points)
        if (p.score) scores.push_back(*p.score);
    if (scores.size() < 2)
        throw Error("volatility for '" + series.token + "' needs >= 2 scored points, has " +
                    std::to_string(scores.size()));
    return stats::stddev_pop(scores);
}

VolatilityTable volatility_table(const std::vector<ChangeSeries>& series) {
    VolatilityTable table;
    for (const auto& s : series) {
        int scored = 0;
        for (const auto& p : s.points)
            if (p.score) ++scored;
        if (scored < 2) {
            table.excluded.emplace_back(s.token, scored);
        } else {
            table.entries.push_back({s.token, volatility(s), scored});
        }
    }
    auto by_token = [](const auto& a, const auto& b) { return a.token < b.token; };
    std::sort(table.entries.begin(), table.entries.end(), by_token);
    std::sort(table.excluded.begin(), table.excluded.end());
    return table;
}

namespace {

std::string cut_label(double cut) {
    std::string s = io::fmt_real(cut);
    return "p" + s;
}

}  // namespace

CohortAssignment percentile_cohorts(const VolatilityTable& table, const std::vector<double>& cuts) {
    if (table.entries.empty()) throw Error("percentile cohorts: empty volatility table");
    if (cuts.empty()) throw Error("percentile cohorts: no cuts given");
    for (size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i] < 0.0 || cuts[i] >= 100.0) throw Error("percentile cut out of [0,100)");
        if (i > 0 && cuts[i] <= cuts[i - 1]) throw Error("percentile cuts must increase");
    }
    const size_t n = table.entries.size();
    if (n < cuts.size())
        throw Error("percentile cohorts: need at least " + std::to_string(cuts.size()) +
                    " tokens, have " + std::to_string(n));

    std::vector<const VolatilityEntry*> order;
    order.reserve(n);
    for (const auto& e : table.entries) order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const VolatilityEntry* a, const VolatilityEntry* b) {
        if (a->volatility != b->volatility) return a->volatility < b->volatility;
        return a->token < b->token;
    });

    // Ties share the average positional rank, so equal volatilities land in
    // the same band.
    std::vector<double> pct(n);
    for (size_t i = 0; i < n;) {
        size_t j = i;
        while (j < n && order[j]->volatility == order[i]->volatility) ++j;
        double avg_rank = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0;
        double p = n == 1 ? 100.0 : 100.0 * avg_rank / static_cast<double>(n - 1);
        for (size_t r = i; r < j; ++r) pct[r] = p;
        i = j;
    }

    CohortAssignment out;
    std::string below = "below-" + cut_label(cuts.front());
    out.labels.push_back(below);
    for (double c : cuts) out.labels.push_back(cut_label(c));
    for (const auto& label : out.labels) out.members[label];

    for (size_t r = 0; r < n; ++r) {
        std::string label = below;
        for (size_t b = 0; b < cuts.size(); ++b)
            if (pct[r] >= cuts[b]) label = out.labels[b + 1];
        out.cohort_of[order[r]->token] = label;
        out.members[label].push_back(order[r]->token);
    }
    for (auto& [label, members] : out.members) std::sort(members.begin(), members.end());
    return out;
}

std::vector<CurvePoint> aggregate_curve(const std::vector<const ChangeSeries*>& group) {
    if (group.empty()) throw Error("aggregate curve of empty group");
    std::map<int, std::vector<double>> by_month;
    for (const auto* s : group)
        for (const auto& p : s->points)
            if (p.score) by_month[p.month.index()].push_back(*p.score);

    std::vector<CurvePoint> out;
    out.reserve(by_month.size());
    for (const auto& [midx, vals] : by_month) {
        CurvePoint cp;
        cp.month = Month::from_index(midx);
        cp.count = static_cast<int>(vals.size());
        cp.mean = stats::mean(vals);
        cp.stddev = stats::stddev_pop(vals);
        out.push_back(cp);
    }
    return out;
}

std::vector<std::string> top_fraction(const VolatilityTable& table, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("top fraction must lie in (0,1]");
    const size_t n = table.entries.size();
    size_t take = static_cast<size_t>(std::ceil(fraction * static_cast<double>(n)));
    take = std::min(take, n);

    std::vector<const VolatilityEntry*> order;
    order.reserve(n);
    for (const auto& e : table.entries) order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const VolatilityEntry* a, const VolatilityEntry* b) {
        if (a->volatility != b->volatility) return a->volatility > b->volatility;
        return a->token < b->token;
    });
    std::vector<std::string> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i) out.push_back(order[i]->token);
    return out;
}

std::map<std::string, std::string> parse_group_tags(const std::string& text) {
    std::map<std::string, std::string> tags;
    size_t pos = 0;
    int lineno = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? text.size() : eol + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw Error("group tag line " + std::to_string(lineno) + " is not token<TAB>group");
        auto [it, inserted] = tags.emplace(line.substr(0, tab), line.substr(tab + 1));
        if (!inserted) throw Error("group tags: duplicate token '" + it->first + "'");
    }
    return tags;
}

std::string volatility_to_csv(const VolatilityTable& table, const CohortAssignment& cohorts) {
    std::string out = "token,volatility,n_points,cohort\n";
    for (const auto& e : table.entries) {
        auto it = cohorts.cohort_of.find(e.token);
        out += io::csv_field(e.token) + ',' + io::fmt_real(e.volatility) + ',' +
               std::to_string(e.n_points) + ',' +
               (it == cohorts.cohort_of.end() ? std::string() : it->second) + '\n';
    }
    return out;
}

std::string cohort_curves_to_csv(
    const std::vector<std::pair<std::string, std::vector<CurvePoint>>>& curves) {
    std::string out = "cohort,month,mean,std,count\n";
    for (const auto& [label, points] : curves) {
        for (const auto& p : points)
            out += label + ',' + p.month.str() + ',' + io::fmt_real(p.mean) + ',' +
                   io::fmt_real(p.stddev) + ',' + std::to_string(p.count) + '\n';
    }
    return out;
}

}  // namespace driftscan
