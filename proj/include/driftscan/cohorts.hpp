#pragma once

#include <map>
#include <string>
#include <vector>

#include "driftscan/scoring.hpp"
#include "driftscan/shape.hpp"

namespace driftscan {

struct VolatilityEntry {
    std::string token;
    double volatility = 0.0;  // ddof=0 stddev of the raw non-missing scores
    int n_points = 0;
};

struct VolatilityTable {
    std::vector<VolatilityEntry> entries;                 // token order
    std::vector<std::pair<std::string, int>> excluded;    // tokens with < 2 scored points
};

// Throws if the series has fewer than 2 non-missing points.
double volatility(const ChangeSeries& series);

VolatilityTable volatility_table(const std::vector<ChangeSeries>& series);

struct CohortAssignment {
    std::vector<std::string> labels;                       // below cohort first, then bands
    std::map<std::string, std::string> cohort_of;          // token -> label
    std::map<std::string, std::vector<std::string>> members;  // label -> tokens (sorted)
};

// Average-rank percentiles (ties share the mean positional rank) over
// volatility; band i covers [cut_i, cut_{i+1}), the last band closes at 100,
// and tokens under the first cut land in an explicit below-band cohort so
// the cohorts partition the table.
CohortAssignment percentile_cohorts(const VolatilityTable& table,
                                    const std::vector<double>& cuts = {50, 75, 90, 95, 99});

// Per calendar month: mean/std/count over all non-missing member scores.
std::vector<CurvePoint> aggregate_curve(const std::vector<const ChangeSeries*>& group);

// ceil(fraction * n) tokens of highest volatility, ties lexicographic.
std::vector<std::string> top_fraction(const VolatilityTable& table, double fraction = 0.10);

// Optional token -> group tags (TSV: token<TAB>group) for grouped aggregate
// curves, e.g. release cohorts.
std::map<std::string, std::string> parse_group_tags(const std::string& text);

std::string volatility_to_csv(const VolatilityTable& table, const CohortAssignment& cohorts);
std::string cohort_curves_to_csv(const std::vector<std::pair<std::string, std::vector<CurvePoint>>>& curves);

}  // namespace driftscan
