#pragma once

#include <string>
#include <vector>

#include "driftscan/scoring.hpp"

namespace driftscan {

struct SmootherConfig {
    int window = 5;  // odd
    int degree = 3;  // < window

    void validate() const;
};

// Fixed-form trajectory: one value per calendar month over a contiguous
// range bounded by the first and last observed points.
struct ShapeProfile {
    std::string token;
    Month start;
    std::vector<double> values;
    std::vector<bool> imputed;  // true where the value came from interpolation
    bool interpolated_stage = false;
    bool smoothed_stage = false;
    bool znormed_stage = false;
    bool degenerate = false;  // zero-variance profile mapped to all-zeros

    size_t length() const { return values.size(); }
    Month month_at(size_t i) const { return start.plus(static_cast<int>(i)); }
};

// Fills internal gaps linearly in month-index coordinates. Never changes
// observed values, never extends past the first/last observed month. Points
// with a MISSING score count as gaps. A series with no scored point yields
// an empty profile.
ShapeProfile interpolate(const ChangeSeries& series);

// Core kernel: least-squares polynomial smoothing with boundary windows
// evaluated from an end-window polynomial fit, so any polynomial of degree
// <= `degree` passes through unchanged. Inputs shorter than the window pass
// through untouched.
std::vector<double> savgol_filter(const std::vector<double>& x, int window, int degree);

ShapeProfile savgol_smooth(ShapeProfile profile, const SmootherConfig& config);

// Population-convention z-normalization; zero-variance profiles map to
// all-zeros and set the degeneracy flag.
ShapeProfile znorm(ShapeProfile profile);

// interpolate -> savgol_smooth -> znorm.
ShapeProfile run_pipeline(const ChangeSeries& series, const SmootherConfig& config);

// Profile export: token,month,value,interpolated_flag.
std::string profile_to_csv(const ShapeProfile& profile);

}  // namespace driftscan
