#include "driftscan/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"

namespace driftscan {

void SmootherConfig::validate() const {
    if (window < 1 || window % 2 == 0) throw Error("smoother window must be a positive odd integer");
    if (degree < 0 || degree >= window) throw Error("smoother degree must satisfy 0 <= degree < window");
}

ShapeProfile interpolate(const ChangeSeries& series) {
    ShapeProfile out;
    out.token = series.token;
    out.interpolated_stage = true;

    std::vector<std::pair<int, double>> observed;  // (month index, score)
    for (const auto& p : series.points)
        if (p.score) observed.emplace_back(p.month.index(), *p.score);
    if (observed.empty()) return out;  // nothing usable; empty profile

    out.start = Month::from_index(observed.front().first);
    int span = observed.back().first - observed.front().first + 1;
    out.values.resize(span);
    out.imputed.assign(span, true);

    for (size_t s = 0; s + 1 < observed.size(); ++s) {
        auto [i0, v0] = observed[s];
        auto [i1, v1] = observed[s + 1];
        for (int i = i0; i < i1; ++i) {
            double frac = static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
            out.values[i - observed.front().first] = v0 + frac * (v1 - v0);
        }
    }
    // Observed values are copied verbatim, overwriting any interpolant above.
    for (auto [idx, v] : observed) {
        out.values[idx - observed.front().first] = v;
        out.imputed[idx - observed.front().first] = false;
    }
    return out;
}

namespace {

// Solves the small SPD normal system G*y = rhs by Gaussian elimination with
// partial pivoting, in extended precision. G and rhs are destroyed.
std::vector<long double> solve_dense(std::vector<std::vector<long double>>& g,
                                     std::vector<long double>& rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(static_cast<double>(g[r][col])) >
                std::fabs(static_cast<double>(g[pivot][col])))
                pivot = r;
        std::swap(g[col], g[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int r = col + 1; r < n; ++r) {
            long double f = g[r][col] / g[col][col];
            for (int c = col; c < n; ++c) g[r][c] -= f * g[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<long double> y(n);
    for (int r = n - 1; r >= 0; --r) {
        long double acc = rhs[r];
        for (int c = r + 1; c < n; ++c) acc -= g[r][c] * y[c];
        y[r] = acc / g[r][r];
    }
    return y;
}

std::vector<std::vector<long double>> normal_matrix(int window, int degree) {
    const int h = window / 2;
    // g[p][q] = sum over nodes j of j^(p+q).
    std::vector<long double> moments(2 * degree + 1, 0.0L);
    for (int j = -h; j <= h; ++j) {
        long double pw = 1.0L;
        for (int e = 0; e <= 2 * degree; ++e) {
            moments[e] += pw;
            pw *= j;
        }
    }
    std::vector<std::vector<long double>> g(degree + 1, std::vector<long double>(degree + 1));
    for (int p = 0; p <= degree; ++p)
        for (int q = 0; q <= degree; ++q) g[p][q] = moments[p + q];
    return g;
}

// Fits the degree-d least-squares polynomial to the window starting at
// `first` (nodes centered on the window midpoint) and returns its
// coefficients.
std::vector<long double> fit_window(const std::vector<double>& x, int first, int window,
                                    int degree) {
    const int h = window / 2;
    auto g = normal_matrix(window, degree);
    std::vector<long double> rhs(degree + 1, 0.0L);
    for (int j = -h; j <= h; ++j) {
        long double pw = 1.0L;
        long double v = x[first + j + h];
        for (int p = 0; p <= degree; ++p) {
            rhs[p] += pw * v;
            pw *= j;
        }
    }
    return solve_dense(g, rhs);
}

long double eval_poly(const std::vector<long double>& coef, long double t) {
    long double acc = 0.0L;
    for (int p = static_cast<int>(coef.size()) - 1; p >= 0; --p) acc = acc * t + coef[p];
    return acc;
}

}  // namespace

std::vector<double> savgol_filter(const std::vector<double>& x, int window, int degree) {
    SmootherConfig{window, degree}.validate();
    const int n = static_cast<int>(x.size());
    if (n < window) return x;

    const int h = window / 2;
    // Interior convolution weights: center row of the least-squares
    // projection for nodes -h..h.
    auto g = normal_matrix(window, degree);
    std::vector<long double> e0(degree + 1, 0.0L);
    e0[0] = 1.0L;
    auto y = solve_dense(g, e0);
    std::vector<long double> w(window);
    for (int j = -h; j <= h; ++j) {
        long double pw = 1.0L, acc = 0.0L;
        for (int p = 0; p <= degree; ++p) {
            acc += y[p] * pw;
            pw *= j;
        }
        w[j + h] = acc;
    }

    std::vector<double> out(n);
    for (int i = h; i < n - h; ++i) {
        long double acc = 0.0L;
        for (int j = -h; j <= h; ++j) acc += w[j + h] * x[i + j];
        out[i] = static_cast<double>(acc);
    }
    // Boundary samples come from the end-window polynomial fits; this keeps
    // degree-<=d polynomials exact over the whole output.
    auto head = fit_window(x, 0, window, degree);
    for (int i = 0; i < h; ++i) out[i] = static_cast<double>(eval_poly(head, i - h));
    auto tail = fit_window(x, n - window, window, degree);
    for (int i = n - h; i < n; ++i)
        out[i] = static_cast<double>(eval_poly(tail, i - (n - 1 - h)));
    return out;
}

ShapeProfile savgol_smooth(ShapeProfile profile, const SmootherConfig& config) {
    config.validate();
    profile.values = savgol_filter(profile.values, config.window, config.degree);
    profile.smoothed_stage = true;
    return profile;
}

ShapeProfile znorm(ShapeProfile profile) {
    profile.znormed_stage = true;
    const size_t n = profile.values.size();
    if (n == 0) return profile;

    bool all_equal = std::all_of(profile.values.begin(), profile.values.end(),
                                 [&](double v) { return v == profile.values.front(); });
    double mean = 0.0;
    for (double v : profile.values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : profile.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);

    if (all_equal || var == 0.0) {
        std::fill(profile.values.begin(), profile.values.end(), 0.0);
        profile.degenerate = true;
        return profile;
    }
    double sd = std::sqrt(var);
    for (double& v : profile.values) v = (v - mean) / sd;
    return profile;
}

ShapeProfile run_pipeline(const ChangeSeries& series, const SmootherConfig& config) {
    return znorm(savgol_smooth(interpolate(series), config));
}

std::string profile_to_csv(const ShapeProfile& profile) {
    std::string out = "token,month,value,interpolated_flag\n";
    for (size_t i = 0; i < profile.values.size(); ++i) {
        out += io::csv_field(profile.token);
        out += ',' + profile.month_at(i).str();
        out += ',' + io::fmt_real(profile.values[i]);
        out += ',';
        out += (profile.imputed.empty() ? false : static_cast<bool>(profile.imputed[i])) ? '1' : '0';
        out += '\n';
    }
    return out;
}

}  // namespace driftscan
