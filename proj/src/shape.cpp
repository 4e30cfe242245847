#include "driftscan/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"

namespace driftscan {

double dtw_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error("dtw: empty profile");
    const size_t n = a.size(), m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = inf;
        for (size_t j = 1; j <= m; ++j) {
            double cost = std::fabs(a[i - 1] - b[j - 1]);
            cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

int ShapeDistanceMatrix::index_of(const std::string& token) const {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
    if (it == tokens.end() || *it != token) return -1;
    return static_cast<int>(it - tokens.begin());
}

namespace {

struct PairIndex {
    size_t i, j;
};

// Canonicalizes the profile order and lists the upper-triangle pairs.
std::vector<const ShapeProfile*> sorted_profiles(const std::vector<ShapeProfile>& profiles) {
    if (profiles.size() < 2) throw Error("distance matrix needs at least 2 profiles");
    std::vector<const ShapeProfile*> ptrs;
    ptrs.reserve(profiles.size());
    for (const auto& p : profiles) {
        if (p.values.empty()) throw Error("distance matrix: empty profile for '" + p.token + "'");
        ptrs.push_back(&p);
    }
    std::sort(ptrs.begin(), ptrs.end(),
              [](const ShapeProfile* a, const ShapeProfile* b) { return a->token < b->token; });
    for (size_t i = 1; i < ptrs.size(); ++i)
        if (ptrs[i]->token == ptrs[i - 1]->token)
            throw Error("distance matrix: duplicate token '" + ptrs[i]->token + "'");
    return ptrs;
}

ShapeDistanceMatrix matrix_shell(const std::vector<const ShapeProfile*>& ptrs,
                                 std::vector<PairIndex>& pairs) {
    ShapeDistanceMatrix mat;
    mat.tokens.reserve(ptrs.size());
    for (const auto* p : ptrs) mat.tokens.push_back(p->token);
    mat.values.assign(ptrs.size() * ptrs.size(), 0.0);
    pairs.clear();
    pairs.reserve(ptrs.size() * (ptrs.size() - 1) / 2);
    for (size_t i = 0; i < ptrs.size(); ++i)
        for (size_t j = i + 1; j < ptrs.size(); ++j) pairs.push_back({i, j});
    return mat;
}

void fill_cell(ShapeDistanceMatrix& mat, const std::vector<const ShapeProfile*>& ptrs,
               PairIndex p) {
    double d = dtw_distance(ptrs[p.i]->values, ptrs[p.j]->values);
    mat.values[p.i * mat.tokens.size() + p.j] = d;
    mat.values[p.j * mat.tokens.size() + p.i] = d;
}

}  // namespace

ShapeDistanceMatrix distance_matrix_serial(const std::vector<ShapeProfile>& profiles) {
    auto ptrs = sorted_profiles(profiles);
    std::vector<PairIndex> pairs;
    ShapeDistanceMatrix mat = matrix_shell(ptrs, pairs);
    for (const auto& p : pairs) fill_cell(mat, ptrs, p);
    return mat;
}

ShapeDistanceMatrix distance_matrix_parallel(const std::vector<ShapeProfile>& profiles) {
    auto ptrs = sorted_profiles(profiles);
    std::vector<PairIndex> pairs;
    ShapeDistanceMatrix mat = matrix_shell(ptrs, pairs);
    const long npairs = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long p = 0; p < npairs; ++p) fill_cell(mat, ptrs, pairs[p]);
    return mat;
}

ShapeDistanceMatrix distance_matrix(const std::vector<ShapeProfile>& profiles, bool parallel) {
    return parallel ? distance_matrix_parallel(profiles) : distance_matrix_serial(profiles);
}

std::vector<NearestShapeFeatures> nearest_shape_features(const ShapeDistanceMatrix& matrix,
                                                         int m) {
    if (m < 1) throw Error("nearest shape features: m must be >= 1");
    const size_t n = matrix.size();
    if (n < 2) throw Error("nearest shape features: need at least 2 tokens");
    const int keep = std::min<int>(m, static_cast<int>(n) - 1);

    std::vector<NearestShapeFeatures> out;
    out.reserve(n);
    std::vector<int> order(n);
    for (size_t t = 0; t < n; ++t) {
        order.clear();
        for (size_t j = 0; j < n; ++j)
            if (j != t) order.push_back(static_cast<int>(j));
        // Index order is token order, so ties already break lexicographically.
        std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](int a, int b) {
            double da = matrix.at(t, a), db = matrix.at(t, b);
            return da < db || (da == db && a < b);
        });
        NearestShapeFeatures f;
        f.token = matrix.tokens[t];
        f.feature_vector.assign(n, 0);
        for (int p = 0; p < keep; ++p) {
            f.neighbors.push_back(matrix.tokens[order[p]]);
            f.feature_vector[order[p]] = 1;
        }
        out.push_back(std::move(f));
    }
    return out;
}

Linkage linkage_from_name(const std::string& name) {
    if (name == "average") return Linkage::Average;
    if (name == "single") return Linkage::Single;
    if (name == "complete") return Linkage::Complete;
    throw Error("unknown linkage '" + name + "'");
}

const char* linkage_name(Linkage l) {
    switch (l) {
        case Linkage::Average: return "average";
        case Linkage::Single: return "single";
        case Linkage::Complete: return "complete";
    }
    return "average";
}

int ClusterReport::cluster_of(const std::string& token) const {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
    if (it == tokens.end() || *it != token) return -1;
    return assignments[it - tokens.begin()];
}

ClusterReport hierarchical_cluster(const std::vector<NearestShapeFeatures>& features,
                                   int n_clusters, Linkage linkage) {
    const int n = static_cast<int>(features.size());
    if (n_clusters < 1 || n_clusters > n)
        throw Error("n_clusters must lie in [1, token count], got " + std::to_string(n_clusters));

    // Canonical token order; feature vectors are already indexed over it.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return features[a].token < features[b].token; });

    ClusterReport report;
    report.tokens.reserve(n);
    for (int i : order) report.tokens.push_back(features[i].token);
    report.n_clusters = n_clusters;

    // Dense pairwise Euclidean distances between feature vectors.
    std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& fi = features[order[i]].feature_vector;
        for (int j = i + 1; j < n; ++j) {
            const auto& fj = features[order[j]].feature_vector;
            if (fi.size() != fj.size()) throw Error("feature vectors differ in length");
            double sq = 0.0;
            for (size_t c = 0; c < fi.size(); ++c) {
                double d = static_cast<double>(fi[c]) - static_cast<double>(fj[c]);
                sq += d * d;
            }
            dist[static_cast<size_t>(i) * n + j] = std::sqrt(sq);
            dist[static_cast<size_t>(j) * n + i] = dist[static_cast<size_t>(i) * n + j];
        }
    }

    struct Cluster {
        bool active = true;
        int size = 1;
        int key = 0;       // index of the smallest member token; permutation-proof tie-break
        int tree_id = 0;   // id in the linkage table
        std::vector<int> members;
    };
    std::vector<Cluster> clusters(n);
    for (int i = 0; i < n; ++i) {
        clusters[i].key = i;
        clusters[i].tree_id = i;
        clusters[i].members = {i};
    }
    auto d_at = [&](int a, int b) -> double& { return dist[static_cast<size_t>(a) * n + b]; };

    std::vector<std::vector<int>> cut_members;  // snapshot at the requested cut
    if (n_clusters == n)
        for (auto& c : clusters) cut_members.push_back(c.members);

    int active = n;
    int next_tree_id = n;
    for (int step = 0; active > 1; ++step) {
        int best_a = -1, best_b = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a) {
            if (!clusters[a].active) continue;
            for (int b = a + 1; b < n; ++b) {
                if (!clusters[b].active) continue;
                double d = d_at(a, b);
                if (d > best_d) continue;
                if (d == best_d && best_a >= 0) {
                    int lo = std::min(clusters[a].key, clusters[b].key);
                    int hi = std::max(clusters[a].key, clusters[b].key);
                    int blo = std::min(clusters[best_a].key, clusters[best_b].key);
                    int bhi = std::max(clusters[best_a].key, clusters[best_b].key);
                    if (std::pair(lo, hi) >= std::pair(blo, bhi)) continue;
                }
                best_d = d;
                best_a = a;
                best_b = b;
            }
        }
        Cluster& ca = clusters[best_a];
        Cluster& cb = clusters[best_b];
        // The linkage row lists the smaller member-token side first.
        int left = ca.key <= cb.key ? ca.tree_id : cb.tree_id;
        int right = ca.key <= cb.key ? cb.tree_id : ca.tree_id;
        report.linkage.push_back({step, left, right, best_d, ca.size + cb.size});

        for (int other = 0; other < n; ++other) {
            if (!clusters[other].active || other == best_a || other == best_b) continue;
            double da = d_at(best_a, other), db = d_at(best_b, other);
            double nd = 0.0;
            switch (linkage) {
                case Linkage::Average:
                    nd = (ca.size * da + cb.size * db) / static_cast<double>(ca.size + cb.size);
                    break;
                case Linkage::Single: nd = std::min(da, db); break;
                case Linkage::Complete: nd = std::max(da, db); break;
            }
            d_at(best_a, other) = nd;
            d_at(other, best_a) = nd;
        }
        ca.size += cb.size;
        ca.key = std::min(ca.key, cb.key);
        ca.tree_id = next_tree_id++;
        ca.members.insert(ca.members.end(), cb.members.begin(), cb.members.end());
        cb.active = false;
        --active;

        if (active == n_clusters) {
            for (auto& c : clusters)
                if (c.active) cut_members.push_back(c.members);
        }
    }

    // Cluster ids by (size desc, smallest member asc), mirroring the usual
    // rank-by-population presentation.
    std::sort(cut_members.begin(), cut_members.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });
    report.assignments.assign(n, -1);
    report.sizes.clear();
    for (size_t cid = 0; cid < cut_members.size(); ++cid) {
        for (int member : cut_members[cid]) report.assignments[member] = static_cast<int>(cid);
        report.sizes.push_back(static_cast<int>(cut_members[cid].size()));
    }
    return report;
}

namespace {

std::vector<CurvePoint> monthly_stats(const std::map<int, std::vector<double>>& by_month) {
    std::vector<CurvePoint> out;
    out.reserve(by_month.size());
    for (const auto& [midx, vals] : by_month) {
        CurvePoint p;
        p.month = Month::from_index(midx);
        p.count = static_cast<int>(vals.size());
        double m = 0.0;
        for (double v : vals) m += v;
        m /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - m) * (v - m);
        var /= static_cast<double>(vals.size());
        p.mean = m;
        p.stddev = std::sqrt(var);
        out.push_back(p);
    }
    return out;
}

}  // namespace

std::vector<ClusterCurve> characteristic_shapes(const ClusterReport& report,
                                                const std::vector<ShapeProfile>& profiles,
                                                const std::vector<ChangeSeries>& raw_series) {
    std::map<std::string, const ShapeProfile*> profile_of;
    for (const auto& p : profiles) profile_of[p.token] = &p;
    std::map<std::string, const ChangeSeries*> series_of;
    for (const auto& s : raw_series) series_of[s.token] = &s;

    // cluster id -> month index -> values; -1 aggregates everything
    std::map<int, std::map<int, std::vector<double>>> zn, raw;
    for (size_t t = 0; t < report.tokens.size(); ++t) {
        const std::string& token = report.tokens[t];
        auto pit = profile_of.find(token);
        if (pit == profile_of.end())
            throw Error("characteristic shapes: no profile for '" + token + "'");
        int cid = report.assignments[t];
        const ShapeProfile& prof = *pit->second;
        for (size_t i = 0; i < prof.values.size(); ++i) {
            int midx = prof.start.index() + static_cast<int>(i);
            zn[cid][midx].push_back(prof.values[i]);
            zn[-1][midx].push_back(prof.values[i]);
        }
        auto sit = series_of.find(token);
        if (sit != series_of.end()) {
            for (const auto& pt : sit->second->points) {
                if (!pt.score) continue;
                raw[cid][pt.month.index()].push_back(*pt.score);
                raw[-1][pt.month.index()].push_back(*pt.score);
            }
        }
    }

    std::vector<ClusterCurve> out;
    out.reserve(zn.size());
    for (auto& [cid, months] : zn) {
        ClusterCurve c;
        c.cluster = cid;
        c.znormed = monthly_stats(months);
        auto rit = raw.find(cid);
        if (rit != raw.end()) c.raw = monthly_stats(rit->second);
        out.push_back(std::move(c));
    }
    return out;  // map order: overall (-1) first, then cluster ids ascending
}

std::string distance_matrix_to_csv(const ShapeDistanceMatrix& matrix) {
    std::string out = "token";
    for (const auto& t : matrix.tokens) out += ',' + io::csv_field(t);
    out += '\n';
    for (size_t i = 0; i < matrix.size(); ++i) {
        out += io::csv_field(matrix.tokens[i]);
        for (size_t j = 0; j < matrix.size(); ++j) out += ',' + io::fmt_real(matrix.at(i, j));
        out += '\n';
    }
    return out;
}

std::string assignments_to_csv(const ClusterReport& report) {
    std::string out = "token,cluster\n";
    for (size_t i = 0; i < report.tokens.size(); ++i)
        out += io::csv_field(report.tokens[i]) + ',' + std::to_string(report.assignments[i]) + '\n';
    return out;
}

std::string linkage_to_csv(const ClusterReport& report) {
    std::string out = "step,left,right,distance,size\n";
    for (const auto& row : report.linkage) {
        out += std::to_string(row.step) + ',' + std::to_string(row.left) + ',' +
               std::to_string(row.right) + ',' + io::fmt_real(row.distance) + ',' +
               std::to_string(row.size) + '\n';
    }
    return out;
}

std::string shapes_to_csv(const std::vector<ClusterCurve>& curves) {
    std::string out = "cluster,month,mean,std,n_members,kind\n";
    auto emit = [&](int cid, const std::vector<CurvePoint>& pts, const char* kind) {
        std::string label = cid < 0 ? "all" : std::to_string(cid);
        for (const auto& p : pts) {
            out += label + ',' + p.month.str() + ',' + io::fmt_real(p.mean) + ',' +
                   io::fmt_real(p.stddev) + ',' + std::to_string(p.count) + ',' + kind + '\n';
        }
    };
    for (const auto& c : curves) emit(c.cluster, c.znormed, "znormed");
    for (const auto& c : curves) emit(c.cluster, c.raw, "raw");
    return out;
}

}  // namespace driftscan
