// Independent brute-force oracles for the test suite. These deliberately
// re-derive everything from raw token/vector pairs with their own arithmetic
// so they share no code path with the library implementations they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "driftscan/snapshot.hpp"

namespace oracle {

using RawTable = std::vector<std::pair<std::string, std::vector<double>>>;

// Small standalone generator for randomized tests (xorshift*), unrelated to
// the library's SplitMix64.
struct TestRng {
    uint64_t state;
    explicit TestRng(uint64_t seed) : state(seed ? seed : 0x9E3779B9ULL) {}
    uint64_t next() {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545F4914F6CDD1DULL;
    }
    double uniform() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int below(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
};

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0, uu = 0, vv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    return dot / (std::sqrt(uu) * std::sqrt(vv));
}

struct RankedNeighbor {
    std::string token;
    double similarity;
};

// Spec-literal k-NN: rank every other token by (similarity desc, token asc),
// truncate to the pool, drop filtered tokens, truncate to k.
inline std::vector<RankedNeighbor> top_k(const RawTable& table, const std::string& target, int k,
                                         int pool, const driftscan::TokenFilter& filter) {
    const std::vector<double>* tv = nullptr;
    for (const auto& [tok, vec] : table)
        if (tok == target) tv = &vec;
    std::vector<RankedNeighbor> all;
    for (const auto& [tok, vec] : table) {
        if (tok == target) continue;
        all.push_back({tok, cosine(*tv, vec)});
    }
    std::sort(all.begin(), all.end(), [](const RankedNeighbor& a, const RankedNeighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.token < b.token;
    });
    if (static_cast<int>(all.size()) > pool) all.resize(pool);
    std::vector<RankedNeighbor> out;
    for (const auto& n : all) {
        if (static_cast<int>(out.size()) == k) break;
        if (filter.rejects(n.token)) continue;
        out.push_back(n);
    }
    return out;
}

// Full re-derivation of the anchored change score: k-NN at both months,
// union restricted to the shared vocabulary, second-order cosines, 1-cos.
// Returns NaN when fewer than min_components survive.
inline double change_score(const RawTable& anchor, const RawTable& at, const std::string& token,
                           int k, int pool, int min_components,
                           const driftscan::TokenFilter& filter) {
    auto nn_a = top_k(anchor, token, k, pool, filter);
    auto nn_t = top_k(at, token, k, pool, filter);
    auto present = [](const RawTable& t, const std::string& tok) {
        for (const auto& [name, vec] : t)
            if (name == tok) return true;
        return false;
    };
    std::vector<std::string> index;
    for (const auto& n : nn_a)
        if (present(at, n.token)) index.push_back(n.token);
    for (const auto& n : nn_t)
        if (present(anchor, n.token)) index.push_back(n.token);
    std::sort(index.begin(), index.end());
    index.erase(std::unique(index.begin(), index.end()), index.end());
    if (static_cast<int>(index.size()) < min_components)
        return std::numeric_limits<double>::quiet_NaN();

    auto vec_of = [](const RawTable& t, const std::string& tok) -> const std::vector<double>& {
        for (const auto& [name, vec] : t)
            if (name == tok) return vec;
        throw std::runtime_error("oracle: token not found");
    };
    std::vector<double> a, b;
    for (const auto& nb : index) {
        a.push_back(std::clamp(cosine(vec_of(anchor, token), vec_of(anchor, nb)), -1.0, 1.0));
        b.push_back(std::clamp(cosine(vec_of(at, token), vec_of(at, nb)), -1.0, 1.0));
    }
    if (a == b) return 0.0;
    return 1.0 - std::clamp(cosine(a, b), -1.0, 1.0);
}

// Exhaustive DTW: minimum total |a_i - b_j| over every monotone
// boundary-to-boundary warping path. Exponential; for short profiles only.
inline double dtw_enumerate(const std::vector<double>& a, const std::vector<double>& b) {
    double best = std::numeric_limits<double>::infinity();
    struct Frame {
        size_t i, j;
        double cost;
    };
    std::vector<Frame> stack{{0, 0, std::fabs(a[0] - b[0])}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.i == a.size() - 1 && f.j == b.size() - 1) {
            best = std::min(best, f.cost);
            continue;
        }
        if (f.i + 1 < a.size())
            stack.push_back({f.i + 1, f.j, f.cost + std::fabs(a[f.i + 1] - b[f.j])});
        if (f.j + 1 < b.size())
            stack.push_back({f.i, f.j + 1, f.cost + std::fabs(a[f.i] - b[f.j + 1])});
        if (f.i + 1 < a.size() && f.j + 1 < b.size())
            stack.push_back({f.i + 1, f.j + 1, f.cost + std::fabs(a[f.i + 1] - b[f.j + 1])});
    }
    return best;
}

// Naive per-window polynomial fit by normal equations in plain double,
// evaluated at the window center. Independent check for interior smoothing.
inline double savgol_center_fit(const std::vector<double>& x, int center, int window, int degree) {
    int h = window / 2;
    int np = degree + 1;
    std::vector<std::vector<double>> g(np, std::vector<double>(np, 0.0));
    std::vector<double> rhs(np, 0.0);
    for (int j = -h; j <= h; ++j) {
        double v = x[center + j];
        for (int p = 0; p < np; ++p) {
            for (int q = 0; q < np; ++q) g[p][q] += std::pow(j, p + q);
            rhs[p] += std::pow(j, p) * v;
        }
    }
    // Gaussian elimination, partial pivoting.
    for (int col = 0; col < np; ++col) {
        int piv = col;
        for (int r = col + 1; r < np; ++r)
            if (std::fabs(g[r][col]) > std::fabs(g[piv][col])) piv = r;
        std::swap(g[col], g[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = col + 1; r < np; ++r) {
            double f = g[r][col] / g[col][col];
            for (int c = col; c < np; ++c) g[r][c] -= f * g[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> coef(np);
    for (int r = np - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < np; ++c) acc -= g[r][c] * coef[c];
        coef[r] = acc / g[r][r];
    }
    return coef[0];  // evaluation at the center node 0
}

inline double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double stddev_pop(const std::vector<double>& xs) {
    double m = mean(xs), s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

// Scratch directory under the ctest working dir; wiped on entry and exit.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) {
        path = std::filesystem::current_path() / ("tmp_" + name);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace oracle
